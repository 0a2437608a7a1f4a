//! In-memory color images and pixel masks.

use crate::color::RgbColor;
use crate::error::{Error, Result};

/// A planar RGB image with real-valued channels on the 8-bit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    channels: [Vec<f64>; 3],
}

impl ColorImage {
    pub fn new(width: usize, height: usize, channels: [Vec<f64>; 3]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        for c in &channels {
            Error::check_len(width * height, c.len())?;
        }
        Ok(Self {
            width,
            height,
            channels,
        })
    }

    pub fn filled(width: usize, height: usize, color: RgbColor) -> Result<Self> {
        let n = width * height;
        Self::new(width, height, [vec![color.r; n], vec![color.g; n], vec![color.b; n]])
    }

    /// Builds an image from interleaved 8-bit RGB bytes.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Error::check_len(width * height * 3, bytes.len())?;
        let mut channels: [Vec<f64>; 3] = Default::default();
        for (c, plane) in channels.iter_mut().enumerate() {
            *plane = bytes.iter().skip(c).step_by(3).map(|&v| v as f64).collect();
        }
        Self::new(width, height, channels)
    }

    /// Interleaved 8-bit RGB, rounding and clamping each channel.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * 3);
        for i in 0..self.len() {
            for c in &self.channels {
                out.push(c[i].round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> RgbColor) -> Result<Self> {
        let mut channels: [Vec<f64>; 3] = Default::default();
        for plane in channels.iter_mut() {
            plane.reserve(width * height);
        }
        for y in 0..height {
            for x in 0..width {
                let c = f(x, y).to_array();
                for k in 0..3 {
                    channels[k].push(c[k]);
                }
            }
        }
        Self::new(width, height, channels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major vertex index of pixel (x, y).
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn pixel(&self, x: usize, y: usize) -> RgbColor {
        self.pixel_at(self.index(x, y))
    }

    pub fn pixel_at(&self, i: usize) -> RgbColor {
        RgbColor::new(self.channels[0][i], self.channels[1][i], self.channels[2][i])
    }

    pub fn set_pixel_at(&mut self, i: usize, c: RgbColor) {
        let c = c.to_array();
        for (plane, v) in self.channels.iter_mut().zip(c) {
            plane[i] = v;
        }
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [Vec<f64>; 3] {
        self.channels
    }

    pub fn same_dims(&self, other: &ColorImage) -> Result<()> {
        Error::check_len(self.width, other.width)?;
        Error::check_len(self.height, other.height)
    }

    /// Clamps every channel to [0, 255].
    pub fn clamp(&mut self) {
        for plane in self.channels.iter_mut() {
            for v in plane.iter_mut() {
                *v = v.clamp(0.0, 255.0);
            }
        }
    }

    /// Rounds every channel to the nearest 8-bit level.
    pub fn quantize(&mut self) {
        for plane in self.channels.iter_mut() {
            for v in plane.iter_mut() {
                *v = v.round().clamp(0.0, 255.0);
            }
        }
    }
}

/// Known/missing flag per pixel. `true` means the pixel was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    known: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize, known: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        Error::check_len(width * height, known.len())?;
        Ok(Self { width, height, known })
    }

    pub fn all_known(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_known(&self, i: usize) -> bool {
        self.known[i]
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn set(&mut self, i: usize, known: bool) {
        self.known[i] = known;
    }

    pub fn missing_count(&self) -> usize {
        self.known.iter().filter(|k| !**k).count()
    }

    pub fn matches(&self, image: &ColorImage) -> Result<()> {
        Error::check_len(image.width(), self.width)?;
        Error::check_len(image.height(), self.height)
    }
}
