//! Image quality metrics: per-channel SNR and SSIM on the HSV Value plane.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::color::rgb_to_value;
use crate::error::{Error, Result};
use crate::image::ColorImage;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_RANGE: f64 = 1.0;

/// A signal-to-noise ratio in dB. A perfect match is `+inf`, which JSON
/// carries as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrDb(pub f64);

impl SnrDb {
    pub fn is_perfect(self) -> bool {
        self.0 == f64::INFINITY
    }
}

impl Serialize for SnrDb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

impl<'de> Deserialize<'de> for SnrDb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(SnrDb(v)),
            Raw::Text(t) if t == "inf" => Ok(SnrDb(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad SNR value `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub snr_rgb: [SnrDb; 3],
    pub ssim: f64,
}

impl QualityReport {
    pub fn compute(reference: &ColorImage, test: &ColorImage) -> Result<Self> {
        Ok(Self {
            snr_rgb: snr_per_channel(reference, test)?,
            ssim: ssim_value(reference, test)?,
        })
    }
}

/// `10 log10(sum ref^2 / sum (ref - test)^2)` for each of R, G, B.
pub fn snr_per_channel(reference: &ColorImage, test: &ColorImage) -> Result<[SnrDb; 3]> {
    reference.same_dims(test)?;
    let mut out = [SnrDb(0.0); 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let (signal, noise) = reference
            .channel(c)
            .iter()
            .zip(test.channel(c))
            .fold((0.0, 0.0), |(s, e), (r, t)| (s + r * r, e + (r - t) * (r - t)));
        *slot = SnrDb(if noise == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (signal / noise).log10()
        });
    }
    Ok(out)
}

pub fn value_plane(image: &ColorImage) -> Vec<f64> {
    (0..image.len()).map(|i| rgb_to_value(image.pixel_at(i))).collect()
}

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let w: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let sum: f64 = w.iter().sum();
    w.into_iter().map(|v| v / sum).collect()
}

/// Separable "valid" filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(plane: &[f64], width: usize, height: usize, window: &[f64]) -> Vec<f64> {
    let k = window.len();
    let (ow, oh) = (width + 1 - k, height + 1 - k);
    let mut rows = vec![0.0; ow * height];
    for y in 0..height {
        for x in 0..ow {
            rows[y * ow + x] = (0..k).map(|i| window[i] * plane[y * width + x + i]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..k).map(|i| window[i] * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM of the HSV Value planes, 11x11 Gaussian window (sigma 1.5),
/// `K1 = 0.01`, `K2 = 0.03`, dynamic range 1.
pub fn ssim_value(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    reference.same_dims(test)?;
    let (w, h) = (reference.width(), reference.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::invalid(format!(
            "SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {w}x{h}"
        )));
    }
    let x = value_plane(reference);
    let y = value_plane(test);
    let window = gaussian_window();
    let product = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<_>>();
    let mu_x = filter_valid(&x, w, h, &window);
    let mu_y = filter_valid(&y, w, h, &window);
    let xx = filter_valid(&product(&x, &x), w, h, &window);
    let yy = filter_valid(&product(&y, &y), w, h, &window);
    let xy = filter_valid(&product(&x, &y), w, h, &window);

    let c1 = (SSIM_K1 * SSIM_RANGE).powi(2);
    let c2 = (SSIM_K2 * SSIM_RANGE).powi(2);
    let total: f64 = (0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let var_x = xx[i] - mx * mx;
            let var_y = yy[i] - my * my;
            let cov = xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (var_x + var_y + c2))
        })
        .sum();
    Ok(total / mu_x.len() as f64)
}
