//! Graph Fourier analysis on the combinatorial Laplacian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Default vertex cap for dense eigendecomposition.
pub const EXACT_CAP: usize = 5000;

/// Eigenvalues below this magnitude are snapped to zero.
const ZERO_CLAMP: f64 = 1e-10;

/// Ascending Laplacian eigenvalues and matching orthonormal eigenvectors
/// (columns of `eigenvectors`).
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, l: usize) -> Vec<f64> {
        self.eigenvectors.column(l).iter().copied().collect()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `X diag(response(lambda)) X^T f`.
    pub fn filter(&self, f: &[f64], response: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let mut coeffs = gft(f, self)?;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= response(lambda);
        }
        igft(&coeffs, self)
    }
}

/// Full eigendecomposition of a symmetric PSD matrix with `dim <= cap`.
pub fn eigendecompose(laplacian: &CsrMatrix, cap: usize) -> Result<SpectralBasis> {
    let n = laplacian.dim();
    if n > cap {
        return Err(Error::TooLargeForExact { vertices: n, cap });
    }
    let eig = SymmetricEigen::new(laplacian.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        eigenvalues.push(if lambda.abs() < ZERO_CLAMP {
            0.0
        } else {
            lambda.max(0.0)
        });
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
    })
}

/// Graph Fourier transform `X^T f`.
pub fn gft(f: &[f64], basis: &SpectralBasis) -> Result<Vec<f64>> {
    Error::check_len(basis.dim(), f.len())?;
    let v = DVector::from_column_slice(f);
    Ok(basis.eigenvectors.tr_mul(&v).iter().copied().collect())
}

/// Inverse transform `X f_hat`.
pub fn igft(f_hat: &[f64], basis: &SpectralBasis) -> Result<Vec<f64>> {
    Error::check_len(basis.dim(), f_hat.len())?;
    let v = DVector::from_column_slice(f_hat);
    Ok((&basis.eigenvectors * v).iter().copied().collect())
}

/// `sqrt(f^T L f)`, with tiny negative round-off clamped to zero.
pub fn quadratic_form(f: &[f64], laplacian: &CsrMatrix) -> Result<f64> {
    let lf = laplacian.mul_vec(f)?;
    let q2: f64 = f.iter().zip(&lf).map(|(a, b)| a * b).sum();
    Ok(q2.max(0.0).sqrt())
}

/// The same quantity evaluated from graph Fourier coefficients:
/// `sqrt(sum_l f_hat(l)^2 lambda_l)`.
pub fn quadratic_form_spectral(f_hat: &[f64], basis: &SpectralBasis) -> Result<f64> {
    Error::check_len(basis.dim(), f_hat.len())?;
    let q2: f64 = f_hat
        .iter()
        .zip(&basis.eigenvalues)
        .map(|(c, lambda)| c * c * lambda)
        .sum();
    Ok(q2.max(0.0).sqrt())
}

const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITER: usize = 500;
const POWER_INFLATION: f64 = 1.01;

/// Gershgorin bound on the spectrum of a symmetric matrix.
pub fn gershgorin_bound(m: &CsrMatrix) -> f64 {
    (0..m.dim()).map(|i| m.abs_row_sum(i)).fold(0.0, f64::max)
}

/// Upper bound on the largest eigenvalue of a symmetric PSD matrix.
///
/// Power iteration from a fixed start vector, inflated by 1% and capped by
/// the Gershgorin bound. Falls back to the Gershgorin bound when the
/// iteration does not settle.
pub fn estimate_lambda_max(laplacian: &CsrMatrix) -> f64 {
    let n = laplacian.dim();
    let gersh = gershgorin_bound(laplacian);
    if n == 0 || gersh == 0.0 {
        return gersh;
    }
    // Fixed pseudo-random start so the estimate is reproducible.
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut previous = 0.0;
    for _ in 0..POWER_MAX_ITER {
        laplacian.mul_vec_into(&v, &mut w);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        if normalize(&mut w) == 0.0 {
            return gersh;
        }
        std::mem::swap(&mut v, &mut w);
        if rayleigh > 0.0 && (rayleigh - previous).abs() <= POWER_TOL * rayleigh {
            return (POWER_INFLATION * rayleigh).min(gersh);
        }
        previous = rayleigh;
    }
    gersh
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}
