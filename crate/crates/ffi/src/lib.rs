//! C ABI for pgwt.
//!
//! Every object crosses the boundary as an opaque pointer that the caller
//! frees with the matching `*_free` function. Every fallible function returns
//! a [`PgwtStatus`]; on failure, `pgwt_last_error` gives a message for the
//! calling thread. Panics are caught and reported as `PGWT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use pgwt::image::{ColorImage, PixelMask};
use pgwt::imggraph::{DistanceMode, GraphParams};
use pgwt::metrics::{snr_per_channel, ssim_value};
use pgwt::report::{RestorationReport, TransformMode};
use pgwt::restore::{
    add_gaussian_noise, denoise, inpaint, DenoiseParams, GraphTransform, InpaintParams, ThresholdSchedule,
};
use pgwt::sgwt::WaveletCoefficients;
use pgwt::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgwtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Numerical = 4,
    Panic = 5,
}

/// Euclidean distance between RGB triples.
pub const PGWT_DISTANCE_EUCLIDEAN: u32 = 0;
/// CIEDE2000 difference between CIELab triples.
pub const PGWT_DISTANCE_CIEDE2000: u32 = 1;

/// Graph and transform settings. Start from `pgwt_graph_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PgwtGraphOptions {
    pub knn: usize,
    pub sigma: f64,
    /// Vertices settled per geodesic search; 0 selects 4 * knn.
    pub geo_budget: usize,
    /// One of the `PGWT_DISTANCE_*` constants.
    pub distance: u32,
    pub scales: usize,
    /// Chebyshev order; 0 selects the exact eigendecomposition.
    pub cheby_order: usize,
}

impl PgwtGraphOptions {
    fn params(&self) -> Result<GraphParams, Failure> {
        let mode = match self.distance {
            PGWT_DISTANCE_EUCLIDEAN => DistanceMode::EuclideanRgb,
            PGWT_DISTANCE_CIEDE2000 => DistanceMode::DeltaE2000,
            d => return Err(Failure::Invalid(format!("unknown distance {d}"))),
        };
        let mut p = GraphParams::new(self.knn, self.sigma, mode);
        if self.geo_budget > 0 {
            p.geodesic_budget = self.geo_budget;
        }
        Ok(p)
    }

    fn transform(&self) -> TransformMode {
        match self.cheby_order {
            0 => TransformMode::Exact,
            order => TransformMode::Chebyshev { order },
        }
    }
}

/// Opaque RGB image with channels in [0, 255].
pub struct PgwtImage(ColorImage);

/// Opaque pixel graph together with its wavelet transform.
pub struct PgwtTransform(GraphTransform);

/// Opaque wavelet coefficients of a color image, one set per channel.
pub struct PgwtCoefficients(Vec<WaveletCoefficients>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> PgwtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PgwtStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as `{name}`"));
            PgwtStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            PgwtStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            if e.is_io() {
                PgwtStatus::Io
            } else if e.is_numerical() {
                PgwtStatus::Numerical
            } else {
                PgwtStatus::InvalidArgument
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            PgwtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &'static str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn path<'a>(p: *const c_char, name: &'static str) -> Result<&'a Path, Failure> {
    let s = deref(p, name)?;
    let s = CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("`{name}` is not valid UTF-8")))?;
    Ok(Path::new(s))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn export_report(report: &RestorationReport, out: *mut *mut c_char) {
    if let Some(out) = unsafe { out.as_mut() } {
        *out = CString::new(report.to_json()).map_or(ptr::null_mut(), CString::into_raw);
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next pgwt call on the same thread.
#[no_mangle]
pub extern "C" fn pgwt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pgwt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn pgwt_graph_options_default() -> PgwtGraphOptions {
    let p = GraphParams::default();
    PgwtGraphOptions {
        knn: p.k,
        sigma: p.sigma,
        geo_budget: 0,
        distance: PGWT_DISTANCE_EUCLIDEAN,
        scales: pgwt::sgwt::DEFAULT_SCALES,
        cheby_order: pgwt::sgwt::DEFAULT_CHEBYSHEV_ORDER,
    }
}

/// Creates an image from interleaved 8-bit RGB bytes (`3 * width * height`).
///
/// # Safety
/// `rgb` must point to `3 * width * height` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_from_rgb8(
    width: usize,
    height: usize,
    rgb: *const u8,
    out: *mut *mut PgwtImage,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let len = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Failure::Invalid("image dimensions overflow".into()))?;
        let img = ColorImage::from_rgb8(width, height, slice(rgb, len, "rgb")?)?;
        *out = boxed(PgwtImage(img));
        Ok(())
    })
}

/// Reads a PNG or PPM file.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_read(path: *const c_char, out: *mut *mut PgwtImage) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(PgwtImage(pgwt::io::read_image(self::path(path, "path")?)?));
        Ok(())
    })
}

/// Writes an image as PNG, rounding and clamping to 8 bits.
///
/// # Safety
/// `image` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_write_png(image: *const PgwtImage, path: *const c_char) -> PgwtStatus {
    guard(|| {
        pgwt::io::write_png(&deref(image, "image")?.0, self::path(path, "path")?)?;
        Ok(())
    })
}

/// Width in pixels, or 0 for NULL.
///
/// # Safety
/// `image` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_width(image: *const PgwtImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.width())
}

/// Height in pixels, or 0 for NULL.
///
/// # Safety
/// `image` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_height(image: *const PgwtImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.height())
}

/// Copies the image out as interleaved 8-bit RGB. `len` must be at least
/// `3 * width * height`.
///
/// # Safety
/// `image` must be a live handle and `rgb` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_to_rgb8(image: *const PgwtImage, rgb: *mut u8, len: usize) -> PgwtStatus {
    guard(|| {
        let bytes = deref(image, "image")?.0.to_rgb8();
        if len < bytes.len() {
            return Err(Failure::Invalid(format!(
                "buffer holds {len} bytes, {} needed",
                bytes.len()
            )));
        }
        slice_mut(rgb, len, "rgb")?[..bytes.len()].copy_from_slice(&bytes);
        Ok(())
    })
}

/// Copies one channel (0 red, 1 green, 2 blue) as doubles in row-major order.
///
/// # Safety
/// `image` must be a live handle and `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_channel(
    image: *const PgwtImage,
    channel: usize,
    values: *mut f64,
    len: usize,
) -> PgwtStatus {
    guard(|| {
        let img = &deref(image, "image")?.0;
        if channel > 2 || len < img.len() {
            return Err(Failure::Invalid(format!(
                "channel {channel} with buffer of {len} values"
            )));
        }
        slice_mut(values, len, "values")?[..img.len()].copy_from_slice(img.channel(channel));
        Ok(())
    })
}

/// # Safety
/// `image` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_free(image: *mut PgwtImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Adds seeded Gaussian noise, rounding and clamping to 8-bit values.
///
/// # Safety
/// `image` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_image_add_noise(
    image: *const PgwtImage,
    std: f64,
    seed: u64,
    out: *mut *mut PgwtImage,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(PgwtImage(add_gaussian_noise(&deref(image, "image")?.0, std, seed)?));
        Ok(())
    })
}

/// Builds the pixel graph of `image` and its wavelet transform.
///
/// # Safety
/// `image` and `options` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_build(
    image: *const PgwtImage,
    options: *const PgwtGraphOptions,
    out: *mut *mut PgwtTransform,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let o = deref(options, "options")?;
        let gt = GraphTransform::from_image(&deref(image, "image")?.0, &o.params()?, o.scales, o.transform())?;
        *out = boxed(PgwtTransform(gt));
        Ok(())
    })
}

/// # Safety
/// `transform` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_vertex_count(transform: *const PgwtTransform) -> usize {
    transform.as_ref().map_or(0, |t| t.0.graph.n_vertices())
}

/// # Safety
/// `transform` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_edge_count(transform: *const PgwtTransform) -> usize {
    transform.as_ref().map_or(0, |t| t.0.graph.edges().len())
}

/// Upper end of the spectral interval used by the transform, or 0 for NULL.
///
/// # Safety
/// `transform` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_lambda_max(transform: *const PgwtTransform) -> f64 {
    transform.as_ref().map_or(0.0, |t| t.0.lambda_max)
}

/// Copies the edge list. Each array must hold `capacity` entries and
/// `capacity` must be at least the edge count.
///
/// # Safety
/// `transform` must be a live handle; `a`, `b`, `w` must point to
/// `capacity` writable entries.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_edges(
    transform: *const PgwtTransform,
    a: *mut usize,
    b: *mut usize,
    w: *mut f64,
    capacity: usize,
) -> PgwtStatus {
    guard(|| {
        let edges = deref(transform, "transform")?.0.graph.edges();
        if capacity < edges.len() {
            return Err(Failure::Invalid(format!("capacity {capacity} < {} edges", edges.len())));
        }
        let (a, b, w) = (
            slice_mut(a, capacity, "a")?,
            slice_mut(b, capacity, "b")?,
            slice_mut(w, capacity, "w")?,
        );
        for (i, e) in edges.iter().enumerate() {
            a[i] = e.a;
            b[i] = e.b;
            w[i] = e.w;
        }
        Ok(())
    })
}

/// Channel-averaged quadratic form sqrt(f^T L f) of `image` on the graph.
///
/// # Safety
/// `transform` and `image` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_quadratic_form(
    transform: *const PgwtTransform,
    image: *const PgwtImage,
    q: *mut f64,
) -> PgwtStatus {
    guard(|| {
        let q = out_ptr(q, "q")?;
        let t = &deref(transform, "transform")?.0;
        let img = &deref(image, "image")?.0;
        *q = t.quadratic_forms(img, &t.decompose(img)?)?.q;
        Ok(())
    })
}

/// Forward transform of all three channels.
///
/// # Safety
/// `transform` and `image` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_decompose(
    transform: *const PgwtTransform,
    image: *const PgwtImage,
    out: *mut *mut PgwtCoefficients,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let coeffs = deref(transform, "transform")?.0.decompose(&deref(image, "image")?.0)?;
        *out = boxed(PgwtCoefficients(coeffs));
        Ok(())
    })
}

/// # Safety
/// `transform` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn pgwt_transform_free(transform: *mut PgwtTransform) {
    if !transform.is_null() {
        drop(Box::from_raw(transform));
    }
}

/// Number of planes per channel (scaling plane plus one per scale).
///
/// # Safety
/// `coeffs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pgwt_coefficients_plane_count(coeffs: *const PgwtCoefficients) -> usize {
    coeffs.as_ref().and_then(|c| c.0.first()).map_or(0, |c| c.planes.len())
}

/// Copies plane `plane` (0 is the scaling plane) of `channel`.
///
/// # Safety
/// `coeffs` must be a live handle and `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_coefficients_plane(
    coeffs: *const PgwtCoefficients,
    channel: usize,
    plane: usize,
    values: *mut f64,
    len: usize,
) -> PgwtStatus {
    guard(|| {
        let c = &deref(coeffs, "coeffs")?.0;
        let p = c
            .get(channel)
            .and_then(|c| c.planes.get(plane))
            .ok_or_else(|| Failure::Invalid(format!("no plane {plane} in channel {channel}")))?;
        if len < p.len() {
            return Err(Failure::Invalid(format!(
                "buffer holds {len} values, {} needed",
                p.len()
            )));
        }
        slice_mut(values, len, "values")?[..p.len()].copy_from_slice(p);
        Ok(())
    })
}

/// # Safety
/// `coeffs` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn pgwt_coefficients_free(coeffs: *mut PgwtCoefficients) {
    if !coeffs.is_null() {
        drop(Box::from_raw(coeffs));
    }
}

/// Denoises `noisy`. If `report_json` is not NULL it receives the JSON
/// report, to be released with `pgwt_string_free`.
///
/// # Safety
/// `noisy` must be a live handle and `options` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pgwt_denoise(
    noisy: *const PgwtImage,
    options: *const PgwtGraphOptions,
    smooth_sigma: f64,
    threshold_mult: f64,
    out: *mut *mut PgwtImage,
    report_json: *mut *mut c_char,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let o = deref(options, "options")?;
        let params = DenoiseParams {
            graph: o.params()?,
            scales: o.scales,
            threshold_multiplier: threshold_mult,
            smooth_sigma,
            transform: o.transform(),
        };
        let r = denoise(&deref(noisy, "noisy")?.0, &params, None)?;
        export_report(&r.report, report_json);
        *out = boxed(PgwtImage(r.image));
        Ok(())
    })
}

/// Inpaints the pixels where `known[i] == 0`, with the threshold set to
/// `threshold_mult` times the estimated noise level. Observed pixels are
/// copied unchanged.
///
/// # Safety
/// `attacked` must be a live handle, `known` must point to `width * height`
/// bytes and `options` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pgwt_inpaint(
    attacked: *const PgwtImage,
    known: *const u8,
    options: *const PgwtGraphOptions,
    iterations: usize,
    threshold_mult: f64,
    out: *mut *mut PgwtImage,
    report_json: *mut *mut c_char,
) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let img = &deref(attacked, "attacked")?.0;
        let o = deref(options, "options")?;
        let known = slice(known, img.len(), "known")?.iter().map(|&k| k != 0).collect();
        let mask = PixelMask::new(img.width(), img.height(), known)?;
        let params = InpaintParams {
            graph: o.params()?,
            scales: o.scales,
            iterations,
            schedule: ThresholdSchedule::Estimated {
                multiplier: threshold_mult,
            },
            transform: o.transform(),
        };
        let r = inpaint(img, &mask, &params, None)?;
        export_report(&r.report, report_json);
        *out = boxed(PgwtImage(r.image));
        Ok(())
    })
}

/// Per-channel power-ratio SNR in dB. A perfect match gives +infinity.
///
/// # Safety
/// Both images must be live handles and `snr` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_snr(reference: *const PgwtImage, test: *const PgwtImage, snr: *mut f64) -> PgwtStatus {
    guard(|| {
        let s = snr_per_channel(&deref(reference, "reference")?.0, &deref(test, "test")?.0)?;
        let out = slice_mut(snr, 3, "snr")?;
        for (o, v) in out.iter_mut().zip(s) {
            *o = v.0;
        }
        Ok(())
    })
}

/// SSIM of the HSV Value planes.
///
/// # Safety
/// Both images must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pgwt_ssim(reference: *const PgwtImage, test: *const PgwtImage, ssim: *mut f64) -> PgwtStatus {
    guard(|| {
        let out = out_ptr(ssim, "ssim")?;
        *out = ssim_value(&deref(reference, "reference")?.0, &deref(test, "test")?.0)?;
        Ok(())
    })
}
