//! Weighted pixel graphs.
//!
//! Each pixel becomes a vertex carrying a 5-D feature (x, y and three color
//! coordinates). Topology comes from a symmetrized k-NN graph in that feature
//! space; every vertex is then linked to its `geodesic_budget` nearest
//! vertices by shortest-path (geodesic) distance through the k-NN graph, with
//! Gaussian weights `exp(-rho^2 / sigma^2)`.
//!
//! All orderings break ties by the lower vertex index so graphs are
//! reproducible bit for bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{delta_e2000, delta_e_rgb, srgb_to_lab, LabColor, RgbColor};
use crate::error::{Error, Result};
use crate::image::{ColorImage, PixelMask};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceMode {
    /// Euclidean distance between RGB triples.
    #[serde(rename = "ed")]
    EuclideanRgb,
    /// CIEDE2000 difference between CIELab triples.
    #[serde(rename = "de2000")]
    DeltaE2000,
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ed" => Ok(DistanceMode::EuclideanRgb),
            "de2000" => Ok(DistanceMode::DeltaE2000),
            other => Err(Error::invalid(format!("unknown distance mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureColor {
    Rgb(RgbColor),
    Lab(LabColor),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelFeature {
    pub x: usize,
    pub y: usize,
    pub color: FeatureColor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub k: usize,
    pub sigma: f64,
    pub geodesic_budget: usize,
    pub mode: DistanceMode,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self::new(8, 10.0, DistanceMode::EuclideanRgb)
    }
}

impl GraphParams {
    /// Parameters with the default geodesic budget of `4k`.
    pub fn new(k: usize, sigma: f64, mode: DistanceMode) -> Self {
        Self {
            k,
            sigma,
            geodesic_budget: 4 * k,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be positive and finite"));
        }
        if self.geodesic_budget < self.k {
            return Err(Error::invalid("geodesic budget must be at least k"));
        }
        Ok(())
    }

    /// Gaussian edge weight for a path length `rho`.
    pub fn weight(&self, rho: f64) -> f64 {
        gaussian_weight(rho, self.sigma)
    }
}

pub fn gaussian_weight(rho: f64, sigma: f64) -> f64 {
    (-(rho * rho) / (sigma * sigma)).exp()
}

/// One feature per pixel in row-major order (`index = y * width + x`).
pub fn pixel_features(image: &ColorImage, mode: DistanceMode) -> Result<Vec<PixelFeature>> {
    if image.is_empty() {
        return Err(Error::EmptyImage);
    }
    let features = (0..image.len())
        .map(|i| {
            let rgb = image.pixel_at(i);
            let color = match mode {
                DistanceMode::EuclideanRgb => FeatureColor::Rgb(rgb),
                DistanceMode::DeltaE2000 => FeatureColor::Lab(srgb_to_lab(rgb)),
            };
            PixelFeature {
                x: i % image.width(),
                y: i / image.width(),
                color,
            }
        })
        .collect();
    Ok(features)
}

/// Feature-space distance: spatial offset combined with the color difference
/// of the feature's encoding.
pub fn knn_distance(m: &PixelFeature, n: &PixelFeature) -> Result<f64> {
    let color = match (m.color, n.color) {
        (FeatureColor::Rgb(p), FeatureColor::Rgb(q)) => delta_e_rgb(p, q),
        (FeatureColor::Lab(p), FeatureColor::Lab(q)) => delta_e2000(p, q),
        _ => return Err(Error::ColorModeMismatch),
    };
    let dx = m.x as f64 - n.x as f64;
    let dy = m.y as f64 - n.y as f64;
    Ok((dx * dx + dy * dy + color * color).sqrt())
}

fn check_encoding(features: &[PixelFeature]) -> Result<()> {
    let rgb = |f: &PixelFeature| matches!(f.color, FeatureColor::Rgb(_));
    if let Some(first) = features.first() {
        let want = rgb(first);
        if features.iter().any(|f| rgb(f) != want) {
            return Err(Error::ColorModeMismatch);
        }
    }
    Ok(())
}

// Distance evaluated with the lower index first so both directions of an
// edge get bit-identical lengths.
fn canonical_distance(features: &[PixelFeature], i: usize, j: usize) -> f64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    knn_distance(&features[a], &features[b]).expect("encodings checked")
}

/// Undirected k-NN graph with feature-space edge lengths. Neighbor lists are
/// sorted by vertex index.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl KnnGraph {
    pub fn from_adjacency(mut neighbors: Vec<Vec<(usize, f64)>>) -> Self {
        for list in neighbors.iter_mut() {
            list.sort_by_key(|e| e.0);
        }
        Self { neighbors }
    }

    pub fn n_vertices(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.neighbors[v]
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Uniform grid over feature positions for ring-by-ring neighbor search.
struct SpatialGrid {
    x0: usize,
    y0: usize,
    width: usize,
    height: usize,
    cells: Vec<Vec<usize>>,
}

impl SpatialGrid {
    fn new(features: &[PixelFeature]) -> Self {
        let x0 = features.iter().map(|f| f.x).min().unwrap_or(0);
        let y0 = features.iter().map(|f| f.y).min().unwrap_or(0);
        let width = features.iter().map(|f| f.x).max().unwrap_or(0) - x0 + 1;
        let height = features.iter().map(|f| f.y).max().unwrap_or(0) - y0 + 1;
        let mut cells = vec![Vec::new(); width * height];
        for (i, f) in features.iter().enumerate() {
            cells[(f.y - y0) * width + (f.x - x0)].push(i);
        }
        Self {
            x0,
            y0,
            width,
            height,
            cells,
        }
    }

    /// Calls `visit` for every feature whose cell lies at Chebyshev distance
    /// exactly `r` from (cx, cy). Returns false once the ring lies entirely
    /// outside the grid.
    fn for_ring(&self, cx: usize, cy: usize, r: usize, mut visit: impl FnMut(usize)) -> bool {
        let cx = (cx - self.x0) as isize;
        let cy = (cy - self.y0) as isize;
        let r = r as isize;
        let (w, h) = (self.width as isize, self.height as isize);
        if cx - r < 0 && cy - r < 0 && cx + r >= w && cy + r >= h && r > 0 {
            return false;
        }
        let mut cell = |x: isize, y: isize| {
            if x >= 0 && y >= 0 && x < w && y < h {
                for &i in &self.cells[(y * w + x) as usize] {
                    visit(i);
                }
            }
        };
        if r == 0 {
            cell(cx, cy);
            return true;
        }
        for x in cx - r..=cx + r {
            cell(x, cy - r);
            cell(x, cy + r);
        }
        for y in cy - r + 1..cy + r {
            cell(cx - r, y);
            cell(cx + r, y);
        }
        true
    }
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `k` nearest neighbors of `source` in feature space, nearest first.
fn nearest_neighbors(features: &[PixelFeature], grid: &SpatialGrid, source: usize, k: usize) -> Vec<(f64, usize)> {
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    let f = &features[source];
    let mut r = 0;
    loop {
        let inside = grid.for_ring(f.x, f.y, r, |j| {
            if j == source {
                return;
            }
            let cand = (canonical_distance(features, source, j), j);
            if best.len() == k && by_distance_then_index(&cand, &best[k - 1]) != Ordering::Less {
                return;
            }
            let pos = best
                .binary_search_by(|probe| by_distance_then_index(probe, &cand))
                .unwrap_or_else(|p| p);
            best.insert(pos, cand);
            best.truncate(k);
        });
        // Unvisited features sit at spatial distance >= r + 1.
        if !inside || (best.len() == k && best[k - 1].0 < (r + 1) as f64) {
            break;
        }
        r += 1;
    }
    best
}

/// k-NN graph in feature space, symmetrized by union.
pub fn build_knn(features: &[PixelFeature], k: usize) -> Result<KnnGraph> {
    let n = features.len();
    if n == 0 {
        return Err(Error::EmptyImage);
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k >= n {
        return Err(Error::KnnTooLarge { k, vertices: n });
    }
    check_encoding(features)?;
    let grid = SpatialGrid::new(features);
    let directed: Vec<Vec<(f64, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| nearest_neighbors(features, &grid, i, k))
        .collect();

    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, list) in directed.into_iter().enumerate() {
        for (d, j) in list {
            neighbors[i].push((j, d));
            neighbors[j].push((i, d));
        }
    }
    for list in neighbors.iter_mut() {
        list.sort_by_key(|e| e.0);
        list.dedup_by_key(|e| e.0);
    }
    Ok(KnnGraph { neighbors })
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed so the max-heap pops the smallest (dist, vertex).
    fn cmp(&self, other: &Self) -> Ordering {
        by_distance_then_index(&(other.dist, other.vertex), &(self.dist, self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncated Dijkstra: the `budget` vertices nearest to `source` by
/// shortest-path length, in settling order. The source itself is excluded.
pub fn geodesic_neighborhood(graph: &KnnGraph, source: usize, budget: usize) -> Vec<(usize, f64)> {
    let n = graph.n_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut out = Vec::with_capacity(budget);
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if v != source {
            out.push((v, d));
            if out.len() == budget {
                break;
            }
        }
        for &(u, len) in graph.neighbors(v) {
            let nd = d + len;
            if !settled[u] && nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapEntry { dist: nd, vertex: u });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
}

/// Loopless undirected graph with strictly positive weights. Each edge is
/// stored once with `a < b`, sorted by `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph from arbitrary (m, n, w) triples. Self-loops and
    /// non-positive weights are dropped; a pair listed more than once keeps
    /// its largest weight.
    pub fn from_edges(n_vertices: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut raw: Vec<Edge> = Vec::new();
        for (m, n, w) in triples {
            if m >= n_vertices || n >= n_vertices {
                return Err(Error::invalid(format!(
                    "edge ({m}, {n}) out of range for {n_vertices} vertices"
                )));
            }
            if !w.is_finite() {
                return Err(Error::invalid("edge weight must be finite"));
            }
            if m == n || w <= 0.0 {
                continue;
            }
            let (a, b) = if m < n { (m, n) } else { (n, m) };
            raw.push(Edge { a, b, w });
        }
        raw.sort_by(|x, y| (x.a, x.b).cmp(&(y.a, y.b)).then(y.w.total_cmp(&x.w)));
        raw.dedup_by(|later, kept| later.a == kept.a && later.b == kept.b);
        Ok(Self { n_vertices, edges: raw })
    }

    pub fn empty(n_vertices: usize) -> Self {
        Self {
            n_vertices,
            edges: Vec::new(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, m: usize, n: usize) -> f64 {
        let (a, b) = if m < n { (m, n) } else { (n, m) };
        self.edges
            .binary_search_by(|e| (e.a, e.b).cmp(&(a, b)))
            .map(|k| self.edges[k].w)
            .unwrap_or(0.0)
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_vertices];
        for e in &self.edges {
            d[e.a] += e.w;
            d[e.b] += e.w;
        }
        d
    }

    /// Number of connected components (isolated vertices count as one each).
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n_vertices).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut count = self.n_vertices;
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    /// Writes one `m n w` line per edge with `m < n`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.a, e.b, e.w)?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(n_vertices: usize, input: R) -> Result<Self> {
        let mut triples = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::invalid(format!("malformed edge on line {}", lineno + 1));
            let mut parts = line.split_whitespace();
            let m: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let n: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let w: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            triples.push((m, n, w));
        }
        Self::from_edges(n_vertices, triples)
    }
}

/// Geodesic Gaussian-weighted graph over `features`.
pub fn build_weighted_graph(features: &[PixelFeature], params: &GraphParams) -> Result<WeightedGraph> {
    params.validate()?;
    let knn = build_knn(features, params.k)?;
    let per_source: Vec<Vec<(usize, usize, f64)>> = (0..features.len())
        .into_par_iter()
        .map(|m| {
            geodesic_neighborhood(&knn, m, params.geodesic_budget)
                .into_iter()
                .map(|(n, rho)| (m, n, params.weight(rho)))
                .collect()
        })
        .collect();
    WeightedGraph::from_edges(features.len(), per_source.into_iter().flatten())
}

/// Weighted adjacency matrix with zero diagonal.
pub fn adjacency(g: &WeightedGraph) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(2 * g.edges.len());
    for e in &g.edges {
        triplets.push((e.a, e.b, e.w));
        triplets.push((e.b, e.a, e.w));
    }
    CsrMatrix::from_triplets(g.n_vertices, &triplets)
}

/// Combinatorial Laplacian `D - A`.
pub fn laplacian(g: &WeightedGraph) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(2 * g.edges.len() + g.n_vertices);
    for (i, d) in g.degrees().into_iter().enumerate() {
        if d != 0.0 {
            triplets.push((i, i, d));
        }
    }
    for e in &g.edges {
        triplets.push((e.a, e.b, -e.w));
        triplets.push((e.b, e.a, -e.w));
    }
    CsrMatrix::from_triplets(g.n_vertices, &triplets)
}

const MESH_OFFSETS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Graph for inpainting: the geodesic graph over observed pixels, plus an
/// 8-connected mesh around every missing pixel weighted by spatial distance.
pub fn build_inpainting_topology(
    features: &[PixelFeature],
    mask: &PixelMask,
    params: &GraphParams,
) -> Result<WeightedGraph> {
    params.validate()?;
    let (width, height) = (mask.width(), mask.height());
    Error::check_len(width * height, features.len())?;
    let known: Vec<usize> = (0..features.len()).filter(|&i| mask.is_known(i)).collect();
    if known.is_empty() {
        return Err(Error::AllMissing);
    }

    let mut triples = Vec::new();
    if known.len() > 1 {
        let subset: Vec<PixelFeature> = known.iter().map(|&i| features[i]).collect();
        let mut sub_params = *params;
        sub_params.k = params.k.min(known.len() - 1);
        let sub = build_weighted_graph(&subset, &sub_params)?;
        triples.extend(sub.edges.iter().map(|e| (known[e.a], known[e.b], e.w)));
    }

    for i in (0..features.len()).filter(|&i| !mask.is_known(i)) {
        let (x, y) = ((i % width) as isize, (i / width) as isize);
        for (dx, dy) in MESH_OFFSETS {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                continue;
            }
            let j = ny as usize * width + nx as usize;
            let rho = ((dx * dx + dy * dy) as f64).sqrt();
            triples.push((i, j, params.weight(rho)));
        }
    }
    WeightedGraph::from_edges(features.len(), triples)
}
