use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image has no pixels")]
    EmptyImage,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("pixel features use different color encodings")]
    ColorModeMismatch,

    #[error("k = {k} must be smaller than the number of vertices ({vertices})")]
    KnnTooLarge { k: usize, vertices: usize },

    #[error("mask marks every pixel as missing")]
    AllMissing,

    #[error("{vertices} vertices exceed the exact eigendecomposition cap of {cap}; use the Chebyshev path")]
    TooLargeForExact { vertices: usize, cap: usize },

    #[error("graph spectrum is degenerate (lambda_max = 0)")]
    ZeroSpectrum,

    #[error("degenerate Chebyshev interval [0, {0}]")]
    DegenerateInterval(f64),

    #[error("wavelet frame is degenerate (lower frame bound {lower:e})")]
    DegenerateFrame { lower: f64 },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, actual })
        }
    }

    /// True for failures of the numerical procedures themselves.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::DegenerateFrame { .. } | Error::ZeroSpectrum
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Image(_))
    }
}
