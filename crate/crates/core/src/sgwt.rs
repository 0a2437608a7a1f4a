//! Spectral graph wavelet transform.
//!
//! Planes are filtered versions of a graph signal: the scaling plane uses the
//! low-pass kernel `h(L)`, wavelet plane `j` the band-pass kernel
//! `g(t_j L)`. Filtering is either exact (through a full eigendecomposition)
//! or approximated by shifted Chebyshev polynomials of `L`, which only needs
//! sparse matrix-vector products. The transform is an overcomplete frame and
//! is inverted by least squares.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::spectral::{gft, igft, quadratic_form, SpectralBasis};

/// Ratio `lambda_max / lambda_min` used to place scales and size `h`.
pub const SPECTRUM_RATIO: f64 = 20.0;
pub const DEFAULT_CHEBYSHEV_ORDER: usize = 50;
pub const DEFAULT_SCALES: usize = 3;

const CG_TOLERANCE: f64 = 1e-8;
const CG_MAX_ITER: usize = 2000;

/// Band-pass kernel: monic power `x^alpha` below `x1`, power decay
/// `x^-beta` above `x2`, and the cubic spline joining them with matching
/// value and slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineKernel {
    pub alpha: f64,
    pub beta: f64,
    pub x1: f64,
    pub x2: f64,
    /// Cubic coefficients `s(x) = c0 + c1 x + c2 x^2 + c3 x^3` on `[x1, x2]`.
    cubic: [f64; 4],
}

impl Default for SplineKernel {
    fn default() -> Self {
        Self::new(2.0, 2.0, 1.0, 2.0).expect("default knots are valid")
    }
}

impl SplineKernel {
    pub fn new(alpha: f64, beta: f64, x1: f64, x2: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && x1 > 0.0 && x2 > x1) {
            return Err(Error::invalid("spline kernel needs alpha, beta > 0 and 0 < x1 < x2"));
        }
        // Value and slope of the outer pieces at the knots.
        let v1 = 1.0;
        let d1 = alpha / x1;
        let v2 = 1.0;
        let d2 = -beta / x2;
        #[rustfmt::skip]
        let m = Matrix4::new(
            1.0, x1, x1 * x1, x1 * x1 * x1,
            1.0, x2, x2 * x2, x2 * x2 * x2,
            0.0, 1.0, 2.0 * x1, 3.0 * x1 * x1,
            0.0, 1.0, 2.0 * x2, 3.0 * x2 * x2,
        );
        let c = m
            .lu()
            .solve(&Vector4::new(v1, v2, d1, d2))
            .ok_or_else(|| Error::invalid("singular spline system"))?;
        Ok(Self {
            alpha,
            beta,
            x1,
            x2,
            cubic: [c[0], c[1], c[2], c[3]],
        })
    }

    pub fn cubic(&self) -> [f64; 4] {
        self.cubic
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.x1 {
            (x / self.x1).powf(self.alpha)
        } else if x <= self.x2 {
            let [c0, c1, c2, c3] = self.cubic;
            c0 + x * (c1 + x * (c2 + x * c3))
        } else {
            (self.x2 / x).powf(self.beta)
        }
    }

    /// Maximum of the kernel, attained on the spline segment.
    pub fn peak(&self) -> f64 {
        let [_, c1, c2, c3] = self.cubic;
        let mut best = self.eval(self.x1).max(self.eval(self.x2));
        // s'(x) = c1 + 2 c2 x + 3 c3 x^2
        let (a, b, c) = (3.0 * c3, 2.0 * c2, c1);
        let mut roots = Vec::new();
        if a.abs() < 1e-300 {
            if b != 0.0 {
                roots.push(-c / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                roots.push((-b + disc.sqrt()) / (2.0 * a));
                roots.push((-b - disc.sqrt()) / (2.0 * a));
            }
        }
        for r in roots {
            if r > self.x1 && r < self.x2 {
                best = best.max(self.eval(r));
            }
        }
        best
    }
}

/// Default cubic-spline wavelet kernel (`alpha = beta = 2`, knots 1 and 2).
pub fn kernel_g(x: f64) -> f64 {
    if x < 1.0 {
        x * x
    } else if x <= 2.0 {
        -5.0 + x * (11.0 + x * (-6.0 + x))
    } else {
        4.0 / (x * x)
    }
}

/// Low-pass kernel `gamma * exp(-(x / (0.6 lambda_min))^4)`.
pub fn kernel_h(x: f64, lambda_min: f64, gamma: f64) -> f64 {
    gamma * (-(x / (0.6 * lambda_min)).powi(4)).exp()
}

/// `J` log-spaced scales from `x2 / lambda_min` down to `x1 / lambda_max`.
pub fn select_scales(lambda_max: f64, count: usize) -> Result<Vec<f64>> {
    select_scales_for(&SplineKernel::default(), lambda_max, count)
}

fn select_scales_for(kernel: &SplineKernel, lambda_max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("at least one wavelet scale is required"));
    }
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::ZeroSpectrum);
    }
    let lambda_min = lambda_max / SPECTRUM_RATIO;
    let t_max = kernel.x2 / lambda_min;
    let t_min = kernel.x1 / lambda_max;
    if count == 1 {
        return Ok(vec![t_max]);
    }
    let (hi, lo) = (t_max.ln(), t_min.ln());
    Ok((0..count)
        .map(|j| (hi + (lo - hi) * j as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Wavelet and scaling kernels designed for a spectrum `[0, lambda_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub wavelet: SplineKernel,
    pub scales: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// Amplitude of the scaling kernel, the peak of the wavelet kernel.
    pub gamma: f64,
}

impl KernelSpec {
    pub fn new(lambda_max: f64, scale_count: usize) -> Result<Self> {
        Self::with_kernel(SplineKernel::default(), lambda_max, scale_count)
    }

    pub fn with_kernel(wavelet: SplineKernel, lambda_max: f64, scale_count: usize) -> Result<Self> {
        let scales = select_scales_for(&wavelet, lambda_max, scale_count)?;
        Ok(Self {
            gamma: wavelet.peak(),
            wavelet,
            scales,
            lambda_max,
            lambda_min: lambda_max / SPECTRUM_RATIO,
        })
    }

    pub fn scale_count(&self) -> usize {
        self.scales.len()
    }

    /// Scaling plane plus one plane per scale.
    pub fn plane_count(&self) -> usize {
        self.scales.len() + 1
    }

    pub fn scaling(&self, x: f64) -> f64 {
        kernel_h(x, self.lambda_min, self.gamma)
    }

    pub fn wavelet_at(&self, scale: usize, x: f64) -> f64 {
        self.wavelet.eval(self.scales[scale] * x)
    }

    /// Kernel of plane `tau`: 0 is the scaling kernel, `j >= 1` the wavelet
    /// kernel at scale `t_j`.
    pub fn plane_kernel(&self, tau: usize, x: f64) -> f64 {
        if tau == 0 {
            self.scaling(x)
        } else {
            self.wavelet_at(tau - 1, x)
        }
    }

    /// `h(x)^2 + sum_j g(t_j x)^2`, the diagonal of the frame operator.
    pub fn frame_density(&self, x: f64) -> f64 {
        (0..self.plane_count()).map(|t| self.plane_kernel(t, x).powi(2)).sum()
    }
}

/// SGWT planes of one channel: scaling plane first, then scales
/// `t_1 > ... > t_J`, i.e. coarse to fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletCoefficients {
    pub channel: usize,
    pub planes: Vec<Vec<f64>>,
}

impl WaveletCoefficients {
    pub fn zeros(channel: usize, planes: usize, n: usize) -> Self {
        Self {
            channel,
            planes: vec![vec![0.0; n]; planes],
        }
    }

    pub fn signal_len(&self) -> usize {
        self.planes.first().map_or(0, Vec::len)
    }

    pub fn scaling(&self) -> &[f64] {
        &self.planes[0]
    }

    /// Wavelet planes only.
    pub fn wavelets(&self) -> &[Vec<f64>] {
        &self.planes[1..]
    }

    pub fn wavelets_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.planes[1..]
    }

    /// The finest wavelet plane (smallest scale).
    pub fn finest(&self) -> Option<&[f64]> {
        if self.planes.len() > 1 {
            self.planes.last().map(Vec::as_slice)
        } else {
            None
        }
    }
}

/// Exact forward transform through the eigendecomposition.
pub fn forward_exact(f: &[f64], basis: &SpectralBasis, spec: &KernelSpec) -> Result<WaveletCoefficients> {
    let f_hat = gft(f, basis)?;
    let lambdas = basis.eigenvalues();
    let planes = (0..spec.plane_count())
        .map(|tau| {
            let filtered: Vec<f64> = f_hat
                .iter()
                .zip(lambdas)
                .map(|(c, &l)| c * spec.plane_kernel(tau, l))
                .collect();
            igft(&filtered, basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveletCoefficients { channel: 0, planes })
}

/// Shifted-Chebyshev expansions of all plane kernels on `[0, lambda_max_bound]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevApprox {
    pub order: usize,
    pub lambda_max_bound: f64,
    /// One coefficient list (`order + 1` entries) per plane kernel.
    pub coeffs: Vec<Vec<f64>>,
}

impl ChebyshevApprox {
    pub fn new(spec: &KernelSpec, order: usize, lambda_max_bound: f64) -> Result<Self> {
        let coeffs = (0..spec.plane_count())
            .map(|tau| chebyshev_coeffs(|x| spec.plane_kernel(tau, x), order, lambda_max_bound))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order,
            lambda_max_bound,
            coeffs,
        })
    }

    /// Evaluates the truncated series of plane `tau` at `x`.
    pub fn eval(&self, tau: usize, x: f64) -> f64 {
        chebyshev_eval(&self.coeffs[tau], x, self.lambda_max_bound)
    }
}

/// First `order + 1` coefficients of `kernel(x) ~ sum_k c_k T_k(y)` on
/// `[0, upper]` with `x = upper (y + 1) / 2`. The constant term is `c_0`
/// itself (not halved).
///
/// Uses the trapezoid rule on `y = cos(theta)` with `10 (order + 1)` panels.
pub fn chebyshev_coeffs(kernel: impl Fn(f64) -> f64, order: usize, upper: f64) -> Result<Vec<f64>> {
    if order < 3 {
        return Err(Error::invalid("Chebyshev order must be at least 3"));
    }
    if !(upper > 0.0) || !upper.is_finite() {
        return Err(Error::DegenerateInterval(upper));
    }
    let half = upper / 2.0;
    let panels = 10 * (order + 1);
    let samples: Vec<(f64, f64)> = (0..=panels)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / panels as f64;
            let end_weight = if i == 0 || i == panels { 0.5 } else { 1.0 };
            (theta, end_weight * kernel(half * (theta.cos() + 1.0)))
        })
        .collect();
    let coeffs = (0..=order)
        .map(|k| {
            let sum: f64 = samples.iter().map(|&(theta, v)| v * (k as f64 * theta).cos()).sum();
            let scale = if k == 0 { 1.0 } else { 2.0 };
            scale * sum / panels as f64
        })
        .collect();
    Ok(coeffs)
}

/// Evaluates a shifted Chebyshev series at `x` (Clenshaw recurrence).
pub fn chebyshev_eval(coeffs: &[f64], x: f64, upper: f64) -> f64 {
    let y = 2.0 * x / upper - 1.0;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + y * b1 - b2
}

/// Applies several shifted Chebyshev series of `L` to `f`, sharing the
/// `T_k(L~) f` recurrence across all of them.
fn chebyshev_apply(laplacian: &CsrMatrix, upper: f64, series: &[&[f64]], f: &[f64]) -> Vec<Vec<f64>> {
    let n = f.len();
    let order = series.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut out: Vec<Vec<f64>> = series
        .iter()
        .map(|c| f.iter().map(|v| c.first().copied().unwrap_or(0.0) * v).collect())
        .collect();
    if order <= 1 {
        return out;
    }
    let half = upper / 2.0;
    // L~ = (L - half I) / half
    let shifted = |x: &[f64], y: &mut [f64]| {
        laplacian.mul_vec_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (*yi - half * xi) / half;
        }
    };
    let mut prev = f.to_vec();
    let mut curr = vec![0.0; n];
    shifted(&prev, &mut curr);
    let mut next = vec![0.0; n];
    for k in 1..order {
        for (o, c) in out.iter_mut().zip(series) {
            if let Some(&ck) = c.get(k) {
                o.iter_mut().zip(&curr).for_each(|(oi, ti)| *oi += ck * ti);
            }
        }
        if k + 1 < order {
            shifted(&curr, &mut next);
            for (nx, pr) in next.iter_mut().zip(&prev) {
                *nx = 2.0 * *nx - pr;
            }
            std::mem::swap(&mut prev, &mut curr);
            std::mem::swap(&mut curr, &mut next);
        }
    }
    out
}

/// Chebyshev coefficients of the product of two series.
fn chebyshev_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2
            out[i + j] += 0.5 * ai * bj;
            out[i.abs_diff(j)] += 0.5 * ai * bj;
        }
    }
    out
}

/// Chebyshev-approximated forward transform.
pub fn forward_chebyshev(
    f: &[f64],
    laplacian: &CsrMatrix,
    lambda_max_bound: f64,
    spec: &KernelSpec,
    order: usize,
) -> Result<WaveletCoefficients> {
    Error::check_len(laplacian.dim(), f.len())?;
    let approx = ChebyshevApprox::new(spec, order, lambda_max_bound)?;
    Ok(chebyshev_forward_with(laplacian, &approx, f))
}

fn chebyshev_forward_with(laplacian: &CsrMatrix, approx: &ChebyshevApprox, f: &[f64]) -> WaveletCoefficients {
    let series: Vec<&[f64]> = approx.coeffs.iter().map(Vec::as_slice).collect();
    WaveletCoefficients {
        channel: 0,
        planes: chebyshev_apply(laplacian, approx.lambda_max_bound, &series, f),
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Exact(SpectralBasis),
    Chebyshev {
        laplacian: CsrMatrix,
        approx: ChebyshevApprox,
        /// Series of `sum_tau p_tau(x)^2`, the normal operator.
        normal: Vec<f64>,
    },
}

/// Outcome of a least-squares inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// A ready-to-use transform: kernels plus either an exact basis or a
/// Chebyshev approximation over a Laplacian.
#[derive(Debug, Clone)]
pub struct Sgwt {
    spec: KernelSpec,
    backend: Backend,
}

impl Sgwt {
    pub fn exact(basis: SpectralBasis, spec: KernelSpec) -> Self {
        Self {
            spec,
            backend: Backend::Exact(basis),
        }
    }

    pub fn chebyshev(laplacian: CsrMatrix, lambda_max_bound: f64, spec: KernelSpec, order: usize) -> Result<Self> {
        let approx = ChebyshevApprox::new(&spec, order, lambda_max_bound)?;
        let mut normal = vec![0.0; 2 * order + 1];
        for c in &approx.coeffs {
            for (acc, v) in normal.iter_mut().zip(chebyshev_product(c, c)) {
                *acc += v;
            }
        }
        Ok(Self {
            spec,
            backend: Backend::Chebyshev {
                laplacian,
                approx,
                normal,
            },
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn n_vertices(&self) -> usize {
        match &self.backend {
            Backend::Exact(b) => b.dim(),
            Backend::Chebyshev { laplacian, .. } => laplacian.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.backend, Backend::Exact(_))
    }

    pub fn forward(&self, f: &[f64]) -> Result<WaveletCoefficients> {
        Error::check_len(self.n_vertices(), f.len())?;
        match &self.backend {
            Backend::Exact(basis) => forward_exact(f, basis, &self.spec),
            Backend::Chebyshev { laplacian, approx, .. } => Ok(chebyshev_forward_with(laplacian, approx, f)),
        }
    }

    /// `T^T c`: each plane filtered by its own kernel, then summed.
    pub fn adjoint(&self, coeffs: &WaveletCoefficients) -> Result<Vec<f64>> {
        let n = self.n_vertices();
        Error::check_len(self.spec.plane_count(), coeffs.planes.len())?;
        for p in &coeffs.planes {
            Error::check_len(n, p.len())?;
        }
        let mut out = vec![0.0; n];
        match &self.backend {
            Backend::Exact(basis) => {
                let mut spectrum = vec![0.0; n];
                for (tau, plane) in coeffs.planes.iter().enumerate() {
                    let hat = gft(plane, basis)?;
                    for ((s, h), &l) in spectrum.iter_mut().zip(hat).zip(basis.eigenvalues()) {
                        *s += h * self.spec.plane_kernel(tau, l);
                    }
                }
                out = igft(&spectrum, basis)?;
            }
            Backend::Chebyshev { laplacian, approx, .. } => {
                for (plane, c) in coeffs.planes.iter().zip(&approx.coeffs) {
                    let filtered = chebyshev_apply(laplacian, approx.lambda_max_bound, &[c], plane);
                    out.iter_mut().zip(&filtered[0]).for_each(|(o, v)| *o += v);
                }
            }
        }
        Ok(out)
    }

    fn normal_apply(&self, f: &[f64]) -> Vec<f64> {
        match &self.backend {
            Backend::Exact(basis) => basis
                .filter(f, |l| self.spec.frame_density(l))
                .expect("length checked by caller"),
            Backend::Chebyshev {
                laplacian,
                approx,
                normal,
            } => chebyshev_apply(laplacian, approx.lambda_max_bound, &[normal], f).remove(0),
        }
    }

    /// Lower and upper frame bounds of the transform as implemented.
    ///
    /// Exact: extremes of the frame density over the eigenvalues. Chebyshev:
    /// extremes of the approximated density on a dense grid of the interval.
    pub fn frame_bounds(&self) -> (f64, f64) {
        let values: Vec<f64> = match &self.backend {
            Backend::Exact(basis) => basis
                .eigenvalues()
                .iter()
                .map(|&l| self.spec.frame_density(l))
                .collect(),
            Backend::Chebyshev { approx, normal, .. } => (0..=2000)
                .map(|i| {
                    chebyshev_eval(
                        normal,
                        approx.lambda_max_bound * i as f64 / 2000.0,
                        approx.lambda_max_bound,
                    )
                })
                .collect(),
        };
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    }

    /// Least-squares inverse via conjugate gradient on `T^T T f = T^T c`.
    pub fn inverse(&self, coeffs: &WaveletCoefficients) -> Result<Vec<f64>> {
        self.inverse_with_guess(coeffs, None).map(|(f, _)| f)
    }

    pub fn inverse_with_guess(
        &self,
        coeffs: &WaveletCoefficients,
        guess: Option<&[f64]>,
    ) -> Result<(Vec<f64>, InverseStats)> {
        let (lower, upper) = self.frame_bounds();
        if !(lower > 1e-10 * upper.max(f64::MIN_POSITIVE)) {
            return Err(Error::DegenerateFrame { lower });
        }
        let rhs = self.adjoint(coeffs)?;
        let n = rhs.len();
        let rhs_norm = norm(&rhs);
        if rhs_norm == 0.0 {
            return Ok((
                vec![0.0; n],
                InverseStats {
                    iterations: 0,
                    relative_residual: 0.0,
                },
            ));
        }
        let mut x = match guess {
            Some(g) => {
                Error::check_len(n, g.len())?;
                g.to_vec()
            }
            None => vec![0.0; n],
        };
        let ax = self.normal_apply(&x);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        for it in 0..=CG_MAX_ITER {
            let rel = rr.sqrt() / rhs_norm;
            if rel <= CG_TOLERANCE {
                return Ok((
                    x,
                    InverseStats {
                        iterations: it,
                        relative_residual: rel,
                    },
                ));
            }
            if it == CG_MAX_ITER {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual: rel,
                });
            }
            let ap = self.normal_apply(&p);
            let alpha = rr / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_new;
        }
        unreachable!("loop returns on its final iteration")
    }
}

/// Free-function form of [`Sgwt::inverse`].
pub fn inverse(coeffs: &WaveletCoefficients, transform: &Sgwt) -> Result<Vec<f64>> {
    transform.inverse(coeffs)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Quadratic form of every plane, scaling plane first.
pub fn per_scale_quadratic_forms(coeffs: &WaveletCoefficients, laplacian: &CsrMatrix) -> Result<Vec<f64>> {
    coeffs.planes.iter().map(|p| quadratic_form(p, laplacian)).collect()
}

/// Per-plane quadratic forms averaged over channels.
pub fn average_quadratic_forms(per_channel: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = per_channel.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|t| per_channel.iter().map(|q| q[t]).sum::<f64>() / per_channel.len() as f64)
        .collect()
}
