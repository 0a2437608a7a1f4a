//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pgwt::color::{delta_e2000, LabColor};
use pgwt::image::ColorImage;
use pgwt::imggraph::{
    build_weighted_graph, geodesic_neighborhood, laplacian, pixel_features, DistanceMode, GraphParams, WeightedGraph,
};
use pgwt::io::{write_mask, write_png};
use pgwt::restore::{add_gaussian_noise, denoise, inpaint, DenoiseParams, InpaintParams};
use pgwt::sgwt::{forward_chebyshev, forward_exact, KernelSpec, Sgwt};
use pgwt::spectral::{eigendecompose, estimate_lambda_max, gft, quadratic_form, quadratic_form_spectral, EXACT_CAP};
use pgwt::synthetic::{apply_mask, cartoon, natural, random_mask};
use rand::Rng;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn image_graph(image: &ColorImage, params: &GraphParams) -> WeightedGraph {
    build_weighted_graph(&pixel_features(image, params.mode).unwrap(), params).unwrap()
}

fn channel_q(image: &ColorImage, graph: &WeightedGraph) -> f64 {
    let l = laplacian(graph);
    (0..3)
        .map(|c| quadratic_form(image.channel(c), &l).unwrap())
        .sum::<f64>()
        / 3.0
}

fn quadratic_form_equivalence() -> Outcome {
    let mut r = common::rng(101);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(2..=50);
        let p = r.random_range(0.05..0.5);
        let g = common::random_graph(&mut r, n, p);
        let l = laplacian(&g);
        let basis = eigendecompose(&l, EXACT_CAP).unwrap();
        for _ in 0..5 {
            let f: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
            let vertex = quadratic_form(&f, &l).unwrap();
            let spectral = quadratic_form_spectral(&gft(&f, &basis).unwrap(), &basis).unwrap();
            worst = worst.max((vertex - spectral).abs());
        }
    }
    outcome(
        worst < 1e-8,
        format!("50 graphs x 5 signals, max |q - q_spectral| = {worst:.2e} (tol 1e-8)"),
    )
}

fn perfect_reconstruction() -> Outcome {
    let img = natural(32, 32);
    let g = image_graph(&img, &GraphParams::default());
    let basis = eigendecompose(&laplacian(&g), EXACT_CAP).unwrap();
    let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
    let t = Sgwt::exact(basis, spec);
    let mut r = common::rng(102);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let f = common::random_signal(&mut r, 1024);
        let back = t.inverse(&t.forward(&f).unwrap()).unwrap();
        worst = worst.max(common::relative_error(&back, &f));
    }
    outcome(
        worst < 1e-6,
        format!("32x32 image graph, 5 random signals, max relative error = {worst:.2e} (tol 1e-6)"),
    )
}

fn chebyshev_fidelity() -> Outcome {
    let mut r = common::rng(103);
    let mut graphs: Vec<(String, WeightedGraph)> = [50, 100, 200, 500]
        .iter()
        .map(|&n| {
            (
                format!("random n={n}"),
                common::random_connected_graph(&mut r, n, 8.0 / n as f64),
            )
        })
        .collect();
    graphs.push((
        "cartoon 20x20".into(),
        image_graph(&cartoon(20, 20), &GraphParams::default()),
    ));
    graphs.push((
        "natural 20x20".into(),
        image_graph(&natural(20, 20), &GraphParams::default()),
    ));
    let orders = [10, 20, 40, 50, 60];
    let mut worst50 = 0.0f64;
    let mut monotone = true;
    let mut lines = Vec::new();
    for (name, g) in &graphs {
        let l = laplacian(g);
        let basis = eigendecompose(&l, EXACT_CAP).unwrap();
        let spec = KernelSpec::new(basis.lambda_max(), 3).unwrap();
        let bound = estimate_lambda_max(&l);
        let f = common::random_signal(&mut r, g.n_vertices());
        let exact = forward_exact(&f, &basis, &spec).unwrap();
        let devs: Vec<f64> = orders
            .iter()
            .map(|&m| {
                let c = forward_chebyshev(&f, &l, bound, &spec, m).unwrap();
                (0..c.planes.len())
                    .map(|t| common::max_abs_diff(&c.planes[t], &exact.planes[t]))
                    .fold(0.0, f64::max)
            })
            .collect();
        worst50 = worst50.max(devs[3]);
        let trend = [devs[0], devs[1], devs[2], devs[4]];
        monotone &= trend.windows(2).all(|w| w[1] <= w[0]);
        lines.push(format!(
            "{name}: M=10 {:.1e}, 20 {:.1e}, 40 {:.1e}, 50 {:.1e}, 60 {:.1e}",
            devs[0], devs[1], devs[2], devs[3], devs[4]
        ));
    }
    outcome(
        worst50 < 1e-3 && monotone,
        format!(
            "max deviation at M=50 = {worst50:.2e} (tol 1e-3), non-increasing over M in {{10,20,40,60}}: {monotone}\n       {}",
            lines.join("\n       ")
        ),
    )
}

fn sigma_trend() -> Outcome {
    let img = natural(48, 48);
    let narrow = image_graph(&img, &GraphParams::new(8, 5.0, DistanceMode::EuclideanRgb));
    let wide = image_graph(&img, &GraphParams::new(8, 30.0, DistanceMode::EuclideanRgb));
    let pairs = |g: &WeightedGraph| g.edges().iter().map(|e| (e.a, e.b)).collect::<Vec<_>>();
    let same_topology = pairs(&narrow) == pairs(&wide);
    let (q5, q30) = (channel_q(&img, &narrow), channel_q(&img, &wide));
    outcome(
        q30 > q5 && same_topology,
        format!("natural 48x48 ED: q(sigma=5) = {q5:.2}, q(sigma=30) = {q30:.2}, same topology: {same_topology}"),
    )
}

fn distance_mode_trend() -> Outcome {
    let img = natural(48, 48);
    let ed = channel_q(
        &img,
        &image_graph(&img, &GraphParams::new(8, 30.0, DistanceMode::EuclideanRgb)),
    );
    let de = channel_q(
        &img,
        &image_graph(&img, &GraphParams::new(8, 30.0, DistanceMode::DeltaE2000)),
    );
    outcome(
        de > ed,
        format!("natural 48x48, sigma=30: q(ED) = {ed:.2}, q(dE2000) = {de:.2}"),
    )
}

struct DenoiseRun {
    snr_in: [f64; 3],
    snr_out: [f64; 3],
    ssim_in: f64,
    ssim_out: f64,
    seconds: f64,
}

fn denoise_run(mode: DistanceMode, std: f64) -> DenoiseRun {
    let clean = cartoon(64, 64);
    let noisy = add_gaussian_noise(&clean, std, 2024).unwrap();
    let params = DenoiseParams {
        graph: GraphParams::new(8, published_sigma(mode), mode),
        ..DenoiseParams::default()
    };
    let start = Instant::now();
    let mut out = denoise(&noisy, &params, None).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    out.image.quantize();
    out.attach_metrics(&clean, &noisy).unwrap();
    let (i, o) = (out.report.input_metrics.unwrap(), out.report.metrics.unwrap());
    DenoiseRun {
        snr_in: i.snr_rgb.map(|s| s.0),
        snr_out: o.snr_rgb.map(|s| s.0),
        ssim_in: i.ssim,
        ssim_out: o.ssim,
        seconds,
    }
}

/// Edge-weight widths used for each distance mode in the published denoising runs.
fn published_sigma(mode: DistanceMode) -> f64 {
    match mode {
        DistanceMode::EuclideanRgb => 10.0,
        DistanceMode::DeltaE2000 => 2.0,
    }
}

fn mode_name(mode: DistanceMode) -> &'static str {
    match mode {
        DistanceMode::EuclideanRgb => "ED",
        DistanceMode::DeltaE2000 => "dE2000",
    }
}

fn denoising_improvement(runs: &[(DistanceMode, f64, DenoiseRun)]) -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (mode, std, run) in runs.iter().filter(|(_, s, _)| *s <= 10.0) {
        let ok = (0..3).all(|c| run.snr_out[c] > run.snr_in[c]) && run.ssim_out > run.ssim_in && run.seconds < 120.0;
        pass &= ok;
        lines.push(format!(
            "{} sigma={} std={std}: SNR {:.2?} -> {:.2?} dB, SSIM {:.4} -> {:.4}, {:.1}s",
            mode_name(*mode),
            published_sigma(*mode),
            run.snr_in,
            run.snr_out,
            run.ssim_in,
            run.ssim_out,
            run.seconds
        ));
    }
    outcome(pass, format!("64x64 cartoon\n       {}", lines.join("\n       ")))
}

fn high_noise_caveat(runs: &[(DistanceMode, f64, DenoiseRun)]) -> Outcome {
    let margin = |mode: DistanceMode, std: f64| {
        let run = &runs.iter().find(|(m, s, _)| *m == mode && *s == std).unwrap().2;
        run.ssim_out - run.ssim_in
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for mode in [DistanceMode::EuclideanRgb, DistanceMode::DeltaE2000] {
        let (low, high) = (margin(mode, 5.0), margin(mode, 20.0));
        pass &= high < low;
        lines.push(format!(
            "{} sigma={}: SSIM margin std=5 {low:+.4}, std=20 {high:+.4}, gap (std5 - std20) {:+.4}",
            mode_name(mode),
            published_sigma(mode),
            low - high
        ));
    }
    outcome(pass, format!("64x64 cartoon\n       {}", lines.join("\n       ")))
}

fn inpainting_improvement() -> Outcome {
    let clean = cartoon(64, 64);
    let mask = random_mask(64, 64, 0.1, 77);
    let attacked = apply_mask(&clean, &mask);
    let start = Instant::now();
    let mut out = inpaint(&attacked, &mask, &InpaintParams::default(), None).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    out.image.quantize();
    out.attach_metrics(&clean, &attacked).unwrap();
    let known_identical = (0..clean.len())
        .filter(|&i| mask.is_known(i))
        .all(|i| (0..3).all(|c| out.image.channel(c)[i].to_bits() == attacked.channel(c)[i].to_bits()));
    let (before, after) = (out.report.input_metrics.unwrap().ssim, out.report.metrics.unwrap().ssim);
    outcome(
        after > before && known_identical,
        format!("64x64 cartoon, 10% missing: SSIM {before:.4} -> {after:.4}, known pixels bit-identical: {known_identical}, {seconds:.1}s"),
    )
}

fn ciede2000_correctness() -> Outcome {
    let lab = |v: [f64; 3]| LabColor::new(v[0], v[1], v[2]);
    let mut worst_oracle = 0.0f64;
    let mut worst_table = 0.0f64;
    for (p, q, published) in common::CIEDE2000_PAIRS {
        let got = delta_e2000(lab(p), lab(q));
        worst_oracle = worst_oracle.max((got - common::ciede2000(p, q)).abs());
        worst_table = worst_table.max((got - published).abs());
    }
    outcome(
        worst_oracle < 1e-4 && worst_table < 1e-4,
        format!(
            "{} pairs: max |dE - oracle| = {worst_oracle:.1e}, max |dE - published| = {worst_table:.1e} (tol 1e-4)",
            common::CIEDE2000_PAIRS.len()
        ),
    )
}

fn dijkstra_correctness() -> Outcome {
    let mut r = common::rng(110);
    let mut worst = 0.0f64;
    let mut counts_match = true;
    for _ in 0..20 {
        let n = r.random_range(3..=10);
        let g = common::random_length_graph(&mut r, n, 0.4);
        for s in 0..n {
            let truth = common::all_simple_path_distances(&g, s);
            let got = geodesic_neighborhood(&g, s, n);
            counts_match &= got.len() == truth.iter().enumerate().filter(|&(v, d)| v != s && d.is_some()).count();
            for (v, rho) in got {
                worst = worst.max(truth[v].map_or(f64::INFINITY, |t| (t - rho).abs()));
            }
        }
    }
    outcome(
        worst < 1e-12 && counts_match,
        format!("20 graphs, all sources: max |rho - enumeration| = {worst:.1e}, reachable sets match: {counts_match}"),
    )
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let input = root.join("in.png");
    write_png(&cartoon(32, 32), &input).unwrap();
    let mask = root.join("mask.png");
    write_mask(&random_mask(32, 32, 0.1, 3), &mask).unwrap();
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let commands: Vec<(&str, Vec<String>)> = vec![
        (
            "decompose",
            vec!["decompose".into(), s(&input), "--out".into(), "OUT/planes".into()],
        ),
        (
            "analyze",
            vec![
                "analyze".into(),
                s(&input),
                "--distance".into(),
                "de2000".into(),
                "--report".into(),
                "OUT/report.json".into(),
                "--edges".into(),
                "OUT/edges.txt".into(),
            ],
        ),
        (
            "denoise",
            [
                "denoise",
                &s(&input),
                "--add-noise",
                "10",
                "--seed",
                "7",
                "--ref",
                &s(&input),
                "--out",
                "OUT/out.png",
                "--report",
                "OUT/report.json",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "inpaint",
            [
                "inpaint",
                &s(&input),
                "--mask",
                &s(&mask),
                "--out",
                "OUT/out.png",
                "--report",
                "OUT/report.json",
            ]
            .map(String::from)
            .to_vec(),
        ),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, args) in &commands {
        let mut snapshots = Vec::new();
        for rep in 0..2 {
            let out = root.join(format!("{name}{rep}"));
            std::fs::create_dir_all(&out).unwrap();
            let args: Vec<String> = args.iter().map(|a| a.replace("OUT", &s(&out))).collect();
            let status = Command::new(env!("CARGO_BIN_EXE_pgwt")).args(&args).output().unwrap();
            if !status.status.success() {
                pass = false;
                lines.push(format!(
                    "{name}: failed: {}",
                    String::from_utf8_lossy(&status.stderr).trim()
                ));
            }
            let mut files: Vec<(String, Vec<u8>)> = walk(&out)
                .into_iter()
                .map(|p| {
                    (
                        p.strip_prefix(&out).unwrap().to_string_lossy().into_owned(),
                        std::fs::read(&p).unwrap(),
                    )
                })
                .collect();
            files.sort();
            snapshots.push(files);
        }
        let same = !snapshots[0].is_empty() && snapshots[0] == snapshots[1];
        pass &= same;
        lines.push(format!("{name}: {} files, byte-identical: {same}", snapshots[0].len()));
    }
    outcome(pass, lines.join("; "))
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn main() -> ExitCode {
    let runs: Vec<(DistanceMode, f64, DenoiseRun)> = [DistanceMode::EuclideanRgb, DistanceMode::DeltaE2000]
        .into_iter()
        .flat_map(|m| [5.0, 10.0, 20.0].map(|s| (m, s)))
        .map(|(m, s)| (m, s, denoise_run(m, s)))
        .collect();

    let criteria: Vec<(&str, Check)> = vec![
        (
            "quadratic form, vertex vs spectral domain",
            Box::new(quadratic_form_equivalence),
        ),
        ("perfect reconstruction", Box::new(perfect_reconstruction)),
        ("Chebyshev fidelity", Box::new(chebyshev_fidelity)),
        ("sigma-energy trend", Box::new(sigma_trend)),
        ("distance-mode trend", Box::new(distance_mode_trend)),
        ("denoising improvement", Box::new(|| denoising_improvement(&runs))),
        ("high-noise caveat", Box::new(|| high_noise_caveat(&runs))),
        ("inpainting improvement", Box::new(inpainting_improvement)),
        ("CIEDE2000 correctness", Box::new(ciede2000_correctness)),
        ("Dijkstra correctness", Box::new(dijkstra_correctness)),
        ("CLI determinism", Box::new(cli_determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "[{}] {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
