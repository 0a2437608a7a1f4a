//! Perceptual graph wavelets for color images.
//!
//! A color image is turned into a weighted graph whose edges follow
//! geodesic distances through a k-nearest-neighbor graph of
//! `(x, y, color)` features, with color compared either as Euclidean RGB
//! distance or as CIEDE2000 difference. The spectral graph wavelet
//! transform on that graph drives a denoiser and an inpainter.
//!
//! ```no_run
//! use pgwt::imggraph::{DistanceMode, GraphParams};
//! use pgwt::report::TransformMode;
//! use pgwt::restore::{denoise, DenoiseParams};
//!
//! let noisy = pgwt::io::read_image("noisy.png".as_ref())?;
//! let params = DenoiseParams {
//!     graph: GraphParams::new(8, 2.0, DistanceMode::DeltaE2000),
//!     transform: TransformMode::Chebyshev { order: 50 },
//!     ..DenoiseParams::default()
//! };
//! let out = denoise(&noisy, &params, None)?;
//! pgwt::io::write_png(&out.image, "denoised.png".as_ref())?;
//! # Ok::<(), pgwt::Error>(())
//! ```

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod color;
pub mod error;
pub mod image;
pub mod imggraph;
pub mod io;
pub mod metrics;
pub mod report;
pub mod restore;
pub mod sgwt;
pub mod sparse;
pub mod spectral;
pub mod synthetic;

pub use error::{Error, Result};
pub use image::{ColorImage, PixelMask};
