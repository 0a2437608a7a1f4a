//! Deterministic test images and masks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::color::RgbColor;
use crate::image::{ColorImage, PixelMask};

/// Piecewise-constant scene: a disc, a rectangle and a triangle on a flat
/// background, in four distinct colors.
pub fn cartoon(width: usize, height: usize) -> ColorImage {
    let (w, h) = (width as f64, height as f64);
    ColorImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
        let (dx, dy) = (fx - 0.33 * w, fy - 0.36 * h);
        if dx * dx + dy * dy < (0.22 * w.min(h)).powi(2) {
            RgbColor::new(220.0, 40.0, 40.0)
        } else if fx > 0.55 * w && fx < 0.9 * w && fy > 0.15 * h && fy < 0.5 * h {
            RgbColor::new(40.0, 90.0, 210.0)
        } else if fy > 0.6 * h && fy < 0.92 * h && (fx - 0.6 * w).abs() < (fy - 0.6 * h) * 0.9 {
            RgbColor::new(240.0, 200.0, 40.0)
        } else {
            RgbColor::new(70.0, 160.0, 80.0)
        }
    })
    .expect("nonempty dimensions")
}

/// Smoothly shaded multi-color scene with soft edges and mild texture.
pub fn natural(width: usize, height: usize) -> ColorImage {
    let (w, h) = (width as f64, height as f64);
    ColorImage::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        let sky = [90.0 + 80.0 * v, 140.0 + 60.0 * v, 220.0 - 30.0 * v];
        let ground = [120.0 + 40.0 * u, 100.0 + 20.0 * (8.0 * u).sin(), 50.0];
        let horizon = 0.55 + 0.08 * (6.0 * u).sin();
        let t = 1.0 / (1.0 + (-(v - horizon) * 40.0).exp());
        let mut c: [f64; 3] = std::array::from_fn(|k| sky[k] * (1.0 - t) + ground[k] * t);
        let (dx, dy) = (u - 0.7, v - 0.3);
        let sun = (-(dx * dx + dy * dy) / 0.006).exp();
        let sun_color = [250.0, 210.0, 60.0];
        for k in 0..3 {
            c[k] = c[k] * (1.0 - sun) + sun_color[k] * sun;
        }
        let texture = 12.0 * ((x as f64 * 1.7).sin() * (y as f64 * 1.3).cos()) * t;
        RgbColor::new(
            (c[0] + texture).clamp(0.0, 255.0),
            (c[1] + texture).clamp(0.0, 255.0),
            (c[2] + 0.5 * texture).clamp(0.0, 255.0),
        )
    })
    .expect("nonempty dimensions")
}

/// Marks `fraction` of the pixels (rounded down) as missing, chosen
/// uniformly with a seeded generator.
pub fn random_mask(width: usize, height: usize, fraction: f64, seed: u64) -> PixelMask {
    let n = width * height;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut known = vec![true; n];
    for &i in order.iter().take((fraction.clamp(0.0, 1.0) * n as f64) as usize) {
        known[i] = false;
    }
    PixelMask::new(width, height, known).expect("nonempty dimensions")
}

/// Thin diagonal and horizontal scratches, one pixel wide.
pub fn scratch_mask(width: usize, height: usize) -> PixelMask {
    let mut known = vec![true; width * height];
    for x in 0..width {
        let y1 = x * height / width;
        known[y1.min(height - 1) * width + x] = false;
        let y2 = height / 3;
        if x > width / 5 && x < 4 * width / 5 {
            known[y2 * width + x] = false;
        }
    }
    PixelMask::new(width, height, known).expect("nonempty dimensions")
}

/// Missing axis-aligned block.
pub fn block_mask(width: usize, height: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> PixelMask {
    let mut known = vec![true; width * height];
    for y in y0..(y0 + bh).min(height) {
        for x in x0..(x0 + bw).min(width) {
            known[y * width + x] = false;
        }
    }
    PixelMask::new(width, height, known).expect("nonempty dimensions")
}

/// Copy of `image` with missing pixels set to black.
pub fn apply_mask(image: &ColorImage, mask: &PixelMask) -> ColorImage {
    let mut out = image.clone();
    for i in (0..image.len()).filter(|&i| !mask.is_known(i)) {
        out.set_pixel_at(i, RgbColor::default());
    }
    out
}
