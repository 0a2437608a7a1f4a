//! Image files (PNG, binary PPM), masks, and coefficient dumps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::{GrayImage, ImageReader, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ColorImage, PixelMask};
use crate::sgwt::WaveletCoefficients;

/// Mask pixels with luma at or above this level are observed.
pub const MASK_THRESHOLD: u8 = 128;

/// Reads a PNG or binary PPM file; the format is detected from its content.
pub fn read_image(path: &Path) -> Result<ColorImage> {
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?.to_rgb8();
    ColorImage::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())
}

/// Writes an 8-bit RGB PNG, rounding and clamping each channel.
pub fn write_png(image: &ColorImage, path: &Path) -> Result<()> {
    let buf = RgbImage::from_raw(image.width() as u32, image.height() as u32, image.to_rgb8())
        .expect("buffer matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Reads a mask image: white (luma >= 128) is observed, black is missing.
pub fn read_mask(path: &Path) -> Result<PixelMask> {
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?.to_luma8();
    let known = img.pixels().map(|p| p.0[0] >= MASK_THRESHOLD).collect();
    PixelMask::new(img.width() as usize, img.height() as usize, known)
}

pub fn write_mask(mask: &PixelMask, path: &Path) -> Result<()> {
    let raw = mask.known().iter().map(|&k| if k { 255 } else { 0 }).collect();
    let img = GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw).expect("buffer matches dimensions");
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Writes a plane as grayscale, mapping `[min, max]` affinely onto `[0, 255]`.
/// A flat plane is written as mid-gray.
pub fn write_plane_png(plane: &[f64], width: usize, height: usize, path: &Path) -> Result<()> {
    Error::check_len(width * height, plane.len())?;
    let lo = plane.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = plane.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let raw = plane
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                128
            }
        })
        .collect();
    let img = GrayImage::from_raw(width as u32, height as u32, raw).expect("buffer matches dimensions");
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Shape of a raw coefficient dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub planes: usize,
    pub dtype: String,
    /// Axis order from slowest to fastest varying.
    pub order: Vec<String>,
}

impl DumpHeader {
    pub fn new(width: usize, height: usize, channels: usize, planes: usize) -> Self {
        Self {
            width,
            height,
            channels,
            planes,
            dtype: "f64le".into(),
            order: ["plane", "channel", "row", "column"].map(String::from).to_vec(),
        }
    }

    pub fn value_count(&self) -> usize {
        self.width * self.height * self.channels * self.planes
    }
}

/// Little-endian f64 values, plane-major: for each plane, each channel,
/// then the pixels in row-major order.
pub fn encode_coefficients(coeffs: &[WaveletCoefficients]) -> Vec<u8> {
    let planes = coeffs.first().map_or(0, |c| c.planes.len());
    let mut out = Vec::new();
    for tau in 0..planes {
        for c in coeffs {
            for v in &c.planes[tau] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_coefficients(header: &DumpHeader, bytes: &[u8]) -> Result<Vec<WaveletCoefficients>> {
    Error::check_len(header.value_count() * 8, bytes.len())?;
    let n = header.width * header.height;
    let mut out: Vec<WaveletCoefficients> = (0..header.channels)
        .map(|c| WaveletCoefficients {
            channel: c,
            planes: Vec::with_capacity(header.planes),
        })
        .collect();
    let mut values = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")));
    for _ in 0..header.planes {
        for c in out.iter_mut() {
            c.planes.push(values.by_ref().take(n).collect());
        }
    }
    Ok(out)
}

/// Writes `<stem>.bin` and `<stem>.json` describing it.
pub fn write_coefficient_dump(
    coeffs: &[WaveletCoefficients],
    width: usize,
    height: usize,
    dir: &Path,
    stem: &str,
) -> Result<DumpHeader> {
    let planes = coeffs.first().map_or(0, |c| c.planes.len());
    let header = DumpHeader::new(width, height, coeffs.len(), planes);
    let mut bin = BufWriter::new(File::create(dir.join(format!("{stem}.bin")))?);
    bin.write_all(&encode_coefficients(coeffs))?;
    bin.flush()?;
    std::fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&header).expect("header serializes"),
    )?;
    Ok(header)
}
