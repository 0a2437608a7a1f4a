//! Command-line front end: decompose, analyze, denoise and inpaint.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid parameters, 3 numerical
//! failure.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pgwt::image::ColorImage;
use pgwt::imggraph::{DistanceMode, GraphParams};
use pgwt::io::{read_image, read_mask, write_coefficient_dump, write_plane_png, write_png};
use pgwt::metrics::QualityReport;
use pgwt::report::{ReportParameters, RestorationReport, TransformMode, SNR_DEFINITION};
use pgwt::restore::{
    add_gaussian_noise, denoise, inpaint, DenoiseParams, GraphTransform, InpaintParams, ThresholdSchedule,
};
use pgwt::sgwt::DEFAULT_CHEBYSHEV_ORDER;
use pgwt::Error;

#[derive(Parser)]
#[command(
    name = "pgwt",
    version,
    about = "Graph wavelet analysis and restoration of color images"
)]
struct Cli {
    /// Worker threads (default: one per hardware thread).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write wavelet planes, a raw coefficient dump and a JSON report.
    Decompose(DecomposeArgs),
    /// Print or write the graph summary and quadratic forms only.
    Analyze(AnalyzeArgs),
    /// Hard-threshold graph wavelet denoising.
    Denoise(DenoiseArgs),
    /// Iterative thresholding inpainting of masked pixels.
    Inpaint(InpaintArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Distance {
    Ed,
    De2000,
}

impl From<Distance> for DistanceMode {
    fn from(d: Distance) -> Self {
        match d {
            Distance::Ed => DistanceMode::EuclideanRgb,
            Distance::De2000 => DistanceMode::DeltaE2000,
        }
    }
}

#[derive(Args)]
struct GraphArgs {
    /// Gaussian kernel width of the edge weights.
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    /// Neighbors per pixel in the k-NN graph.
    #[arg(long, default_value_t = 8)]
    knn: usize,
    /// Vertices settled per geodesic search (default: 4 * knn).
    #[arg(long)]
    geo_budget: Option<usize>,
    #[arg(long, value_enum, default_value = "ed")]
    distance: Distance,
    /// Number of wavelet scales J.
    #[arg(long, default_value_t = pgwt::sgwt::DEFAULT_SCALES)]
    scales: usize,
    /// Chebyshev polynomial order.
    #[arg(long, default_value_t = DEFAULT_CHEBYSHEV_ORDER, conflicts_with = "exact")]
    cheby_order: usize,
    /// Use the exact eigendecomposition instead of Chebyshev filtering.
    #[arg(long)]
    exact: bool,
}

impl GraphArgs {
    fn params(&self) -> GraphParams {
        let mut p = GraphParams::new(self.knn, self.sigma, self.distance.into());
        if let Some(b) = self.geo_budget {
            p.geodesic_budget = b;
        }
        p
    }

    fn transform(&self) -> TransformMode {
        if self.exact {
            TransformMode::Exact
        } else {
            TransformMode::Chebyshev {
                order: self.cheby_order,
            }
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    /// Build the graph from this image instead of the input.
    #[arg(long)]
    graph_image: Option<PathBuf>,
    /// Reference image; adds SNR and SSIM of the input.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    /// Write the weighted edge list as `m n w` lines.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// JSON report path (default: standard output).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    common: AnalyzeArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DenoiseArgs {
    input: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2.0)]
    smooth_sigma: f64,
    #[arg(long, default_value_t = 3.0)]
    threshold_mult: f64,
    /// Add Gaussian noise of this standard deviation before denoising.
    #[arg(long)]
    add_noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct InpaintArgs {
    input: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    /// Mask image: white is observed, black is missing.
    #[arg(long)]
    mask: PathBuf,
    #[arg(long, default_value_t = 30)]
    iterations: usize,
    #[arg(long, default_value_t = 3.0, conflicts_with_all = ["alpha", "alpha_decay"])]
    threshold_mult: f64,
    /// Fixed threshold instead of the estimated one.
    #[arg(long, conflicts_with = "alpha_decay")]
    alpha: Option<f64>,
    /// Threshold decaying linearly from START to END.
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    alpha_decay: Option<Vec<f64>>,
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Decompose(a) => run_decompose(a),
        Command::Analyze(a) => run_analyze(a).map(|_| ()),
        Command::Denoise(a) => run_denoise(a),
        Command::Inpaint(a) => run_inpaint(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        1
    } else if e.is_numerical() {
        3
    } else {
        2
    }
}

fn write_report(report: &RestorationReport, path: Option<&Path>) -> pgwt::Result<()> {
    let json = report.to_json();
    match path {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

fn read_reference(path: Option<&PathBuf>, like: &ColorImage) -> pgwt::Result<Option<ColorImage>> {
    path.map(|p| {
        let r = read_image(p)?;
        r.same_dims(like)?;
        Ok(r)
    })
    .transpose()
}

struct Analysis {
    image: ColorImage,
    coeffs: Vec<pgwt::sgwt::WaveletCoefficients>,
    report: RestorationReport,
}

fn analyze(a: &AnalyzeArgs, command: &str) -> pgwt::Result<Analysis> {
    let params = a.graph.params();
    let transform = a.graph.transform();
    let image = read_image(&a.input)?;
    let reference = read_reference(a.reference.as_ref(), &image)?;
    let gt = match &a.graph_image {
        Some(p) => {
            let g = read_image(p)?;
            g.same_dims(&image)?;
            GraphTransform::from_image(&g, &params, a.graph.scales, transform)?
        }
        None => GraphTransform::from_image(&image, &params, a.graph.scales, transform)?,
    };
    if let Some(p) = &a.edges {
        gt.graph.write_edge_list(BufWriter::new(File::create(p)?))?;
    }
    let coeffs = gt.decompose(&image)?;
    let report = RestorationReport {
        command: command.into(),
        width: image.width(),
        height: image.height(),
        parameters: ReportParameters::new(params, a.graph.scales, transform),
        graph: gt.summary(),
        scales: gt.transform.spec().scales.clone(),
        quadratic_forms: gt.quadratic_forms(&image, &coeffs)?,
        noise_estimate: None,
        thresholds: None,
        cg_iterations: None,
        input_metrics: None,
        metrics: reference
            .as_ref()
            .map(|r| QualityReport::compute(r, &image))
            .transpose()?,
        snr_definition: SNR_DEFINITION.into(),
    };
    Ok(Analysis { image, coeffs, report })
}

fn run_analyze(a: &AnalyzeArgs) -> pgwt::Result<Analysis> {
    let out = analyze(a, "analyze")?;
    write_report(&out.report, a.report.as_deref())?;
    Ok(out)
}

fn run_decompose(a: &DecomposeArgs) -> pgwt::Result<()> {
    let out = analyze(&a.common, "decompose")?;
    std::fs::create_dir_all(&a.out)?;
    let (w, h) = (out.image.width(), out.image.height());
    for c in &out.coeffs {
        let name = ["r", "g", "b"][c.channel];
        for (tau, plane) in c.planes.iter().enumerate() {
            write_plane_png(plane, w, h, &a.out.join(format!("plane{tau}_{name}.png")))?;
        }
    }
    write_coefficient_dump(&out.coeffs, w, h, &a.out, "coefficients")?;
    let report_path = a.common.report.clone().unwrap_or_else(|| a.out.join("report.json"));
    write_report(&out.report, Some(&report_path))
}

fn run_denoise(a: &DenoiseArgs) -> pgwt::Result<()> {
    let mut input = read_image(&a.input)?;
    let reference = read_reference(a.reference.as_ref(), &input)?;
    if let Some(std) = a.add_noise {
        input = add_gaussian_noise(&input, std, a.seed)?;
    }
    let params = DenoiseParams {
        graph: a.graph.params(),
        scales: a.graph.scales,
        threshold_multiplier: a.threshold_mult,
        smooth_sigma: a.smooth_sigma,
        transform: a.graph.transform(),
    };
    let mut out = denoise(&input, &params, None)?;
    out.image.quantize();
    if let Some(r) = &reference {
        out.attach_metrics(r, &input)?;
    }
    if let Some(std) = a.add_noise {
        out.report.parameters.noise_std = Some(std);
        out.report.parameters.seed = Some(a.seed);
    }
    write_png(&out.image, &a.out)?;
    write_report(&out.report, a.report.as_deref())
}

fn run_inpaint(a: &InpaintArgs) -> pgwt::Result<()> {
    let input = read_image(&a.input)?;
    let mask = read_mask(&a.mask)?;
    let reference = read_reference(a.reference.as_ref(), &input)?;
    let schedule = match (a.alpha, a.alpha_decay.as_deref()) {
        (Some(alpha), _) => ThresholdSchedule::Fixed { alpha },
        (None, Some(&[start, end])) => ThresholdSchedule::LinearDecay { start, end },
        _ => ThresholdSchedule::Estimated {
            multiplier: a.threshold_mult,
        },
    };
    let params = InpaintParams {
        graph: a.graph.params(),
        scales: a.graph.scales,
        iterations: a.iterations,
        schedule,
        transform: a.graph.transform(),
    };
    let mut out = inpaint(&input, &mask, &params, None)?;
    out.image.quantize();
    if let Some(r) = &reference {
        out.attach_metrics(r, &input)?;
    }
    write_png(&out.image, &a.out)?;
    write_report(&out.report, a.report.as_deref())
}
