//! Independent reference implementations used by the integration tests and
//! the acceptance harness.
#![allow(dead_code)]

use std::f64::consts::PI;

use pgwt::imggraph::{KnnGraph, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Published CIEDE2000 verification pairs: `(lab1, lab2, expected)`.
pub const CIEDE2000_PAIRS: [([f64; 3], [f64; 3], f64); 24] = [
    ([50.0, 2.6772, -79.7751], [50.0, 0.0, -82.7485], 2.0425),
    ([50.0, 3.1571, -77.2803], [50.0, 0.0, -82.7485], 2.8615),
    ([50.0, 2.8361, -74.0200], [50.0, 0.0, -82.7485], 3.4412),
    ([50.0, -1.3802, -84.2814], [50.0, 0.0, -82.7485], 1.0000),
    ([50.0, 0.0, 0.0], [50.0, -1.0, 2.0], 2.3669),
    ([50.0, 2.49, -0.001], [50.0, -2.49, 0.0009], 7.1792),
    ([50.0, 2.49, -0.001], [50.0, -2.49, 0.0011], 7.2195),
    ([50.0, -0.001, 2.49], [50.0, 0.0009, -2.49], 4.8045),
    ([50.0, -0.001, 2.49], [50.0, 0.0011, -2.49], 4.7461),
    ([50.0, 2.5, 0.0], [50.0, 0.0, -2.5], 4.3065),
    ([50.0, 2.5, 0.0], [73.0, 25.0, -18.0], 27.1492),
    ([50.0, 2.5, 0.0], [61.0, -5.0, 29.0], 22.8977),
    ([50.0, 2.5, 0.0], [56.0, -27.0, -3.0], 31.9030),
    ([50.0, 2.5, 0.0], [58.0, 24.0, 15.0], 19.4535),
    ([60.2574, -34.0099, 36.2677], [60.4626, -34.1751, 39.4387], 1.2644),
    ([63.0109, -31.0961, -5.8663], [62.8187, -29.7946, -4.0864], 1.2630),
    ([61.2901, 3.7196, -5.3901], [61.4292, 2.2480, -4.9620], 1.8731),
    ([35.0831, -44.1164, 3.7933], [35.0232, -40.0716, 1.5901], 1.8645),
    ([22.7233, 20.0904, -46.6940], [23.0331, 14.9730, -42.5619], 2.0373),
    ([36.4612, 47.8580, 18.3852], [36.2715, 50.5065, 21.2231], 1.4146),
    ([90.8027, -2.0831, 1.4410], [91.1528, -1.6435, 0.0447], 1.4441),
    ([90.9257, -0.5406, -0.9208], [88.6381, -0.8985, -0.7239], 1.5381),
    ([6.7747, -0.2908, -2.4247], [5.8714, -0.0985, -2.2286], 0.6377),
    ([2.0776, 0.0795, -1.1350], [0.9033, -0.0636, -0.5514], 0.9082),
];

/// CIEDE2000 evaluated in degrees, term by term.
pub fn ciede2000(p: [f64; 3], q: [f64; 3]) -> f64 {
    let deg = |r: f64| r * 180.0 / PI;
    let rad = |d: f64| d * PI / 180.0;
    let [l1, a1, b1] = p;
    let [l2, a2, b2] = q;

    let c_bar = ((a1 * a1 + b1 * b1).sqrt() + (a2 * a2 + b2 * b2).sqrt()) / 2.0;
    let c7 = c_bar.powi(7);
    let g = 0.5 * (1.0 - (c7 / (c7 + 25f64.powi(7))).sqrt());
    let a1p = (1.0 + g) * a1;
    let a2p = (1.0 + g) * a2;
    let c1p = (a1p * a1p + b1 * b1).sqrt();
    let c2p = (a2p * a2p + b2 * b2).sqrt();
    let hue = |b: f64, a: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            let h = deg(b.atan2(a));
            if h < 0.0 {
                h + 360.0
            } else {
                h
            }
        }
    };
    let h1p = hue(b1, a1p);
    let h2p = hue(b2, a2p);

    let dl = l2 - l1;
    let dc = c2p - c1p;
    let dh_angle = if c1p * c2p == 0.0 {
        0.0
    } else if (h2p - h1p).abs() <= 180.0 {
        h2p - h1p
    } else if h2p - h1p > 180.0 {
        h2p - h1p - 360.0
    } else {
        h2p - h1p + 360.0
    };
    let dh = 2.0 * (c1p * c2p).sqrt() * rad(dh_angle / 2.0).sin();

    let l_bar = (l1 + l2) / 2.0;
    let cp_bar = (c1p + c2p) / 2.0;
    let h_bar = if c1p * c2p == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        (h1p + h2p) / 2.0
    } else if h1p + h2p < 360.0 {
        (h1p + h2p + 360.0) / 2.0
    } else {
        (h1p + h2p - 360.0) / 2.0
    };
    let t = 1.0 - 0.17 * rad(h_bar - 30.0).cos() + 0.24 * rad(2.0 * h_bar).cos() + 0.32 * rad(3.0 * h_bar + 6.0).cos()
        - 0.20 * rad(4.0 * h_bar - 63.0).cos();
    let d_theta = 30.0 * (-((h_bar - 275.0) / 25.0).powi(2)).exp();
    let cp7 = cp_bar.powi(7);
    let rc = 2.0 * (cp7 / (cp7 + 25f64.powi(7))).sqrt();
    let sl = 1.0 + 0.015 * (l_bar - 50.0).powi(2) / (20.0 + (l_bar - 50.0).powi(2)).sqrt();
    let sc = 1.0 + 0.045 * cp_bar;
    let sh = 1.0 + 0.015 * cp_bar * t;
    let rt = -rad(2.0 * d_theta).sin() * rc;

    let (x, y, z) = (dl / sl, dc / sc, dh / sh);
    (x * x + y * y + z * z + rt * y * z).sqrt()
}

/// sRGB to CIELab with the RGB-to-XYZ matrix derived from the primaries'
/// chromaticities and the D65 white point.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let xy = [[0.64, 0.33], [0.30, 0.60], [0.15, 0.06]];
    let white_xy = [0.3127, 0.3290];
    let to_xyz = |x: f64, y: f64| [x / y, 1.0, (1.0 - x - y) / y];
    let white = to_xyz(white_xy[0], white_xy[1]);
    let prim: Vec<[f64; 3]> = xy.iter().map(|p| to_xyz(p[0], p[1])).collect();
    // Solve P s = white for the primary scales s (Cramer's rule).
    let m = |r: usize, c: usize| prim[c][r];
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let base = [
        [m(0, 0), m(0, 1), m(0, 2)],
        [m(1, 0), m(1, 1), m(1, 2)],
        [m(2, 0), m(2, 1), m(2, 2)],
    ];
    let d = det3(base);
    let s: Vec<f64> = (0..3)
        .map(|c| {
            let mut a = base;
            for r in 0..3 {
                a[r][c] = white[r];
            }
            det3(a) / d
        })
        .collect();
    let lin = rgb.map(|v| {
        let v = v / 255.0;
        if v <= 0.04045 {
            v / 12.92
        } else {
            ((v + 0.055) / 1.055).powf(2.4)
        }
    });
    let xyz: Vec<f64> = (0..3).map(|r| (0..3).map(|c| m(r, c) * s[c] * lin[c]).sum()).collect();
    let f = |t: f64| {
        let e = 216.0 / 24389.0;
        let k = 24389.0 / 27.0;
        if t > e {
            t.cbrt()
        } else {
            (k * t + 16.0) / 116.0
        }
    };
    let (fx, fy, fz) = (f(xyz[0] / white[0]), f(xyz[1] / white[1]), f(xyz[2] / white[2]));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Random undirected graph with weights in `(0.1, 1]`.
pub fn random_graph(r: &mut impl Rng, n: usize, p: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random::<f64>() < p {
                edges.push((a, b, r.random_range(0.1..=1.0)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// Random graph with a spanning path, so it is connected.
pub fn random_connected_graph(r: &mut impl Rng, n: usize, p: f64) -> WeightedGraph {
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (v - 1, v, r.random_range(0.1..=1.0))).collect();
    for a in 0..n {
        for b in a + 2..n {
            if r.random::<f64>() < p {
                edges.push((a, b, r.random_range(0.1..=1.0)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// Random symmetric adjacency lists with lengths in `[0.5, 5)`.
pub fn random_length_graph(r: &mut impl Rng, n: usize, p: f64) -> KnnGraph {
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if r.random::<f64>() < p {
                let len = r.random_range(0.5..5.0);
                adj[a].push((b, len));
                adj[b].push((a, len));
            }
        }
    }
    KnnGraph::from_adjacency(adj)
}

/// Shortest distance from `source` to every vertex by enumerating all simple
/// paths. Unreachable vertices get `None`.
pub fn all_simple_path_distances(graph: &KnnGraph, source: usize) -> Vec<Option<f64>> {
    fn walk(g: &KnnGraph, v: usize, len: f64, seen: &mut Vec<bool>, best: &mut Vec<Option<f64>>) {
        if best[v].is_none_or(|b| len < b) {
            best[v] = Some(len);
        }
        for &(u, w) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                walk(g, u, len + w, seen, best);
                seen[u] = false;
            }
        }
    }
    let n = graph.n_vertices();
    let mut seen = vec![false; n];
    let mut best = vec![None; n];
    seen[source] = true;
    walk(graph, source, 0.0, &mut seen, &mut best);
    best
}

/// Connected components by depth-first search.
pub fn components(graph: &WeightedGraph) -> usize {
    let n = graph.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    count
}

/// Random vector with entries in `[-1, 1)`.
pub fn random_signal(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn relative_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let diff: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(truth)
}
