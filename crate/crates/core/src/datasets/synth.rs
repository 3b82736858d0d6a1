//! Seeded toy corpus: three glyph classes drawn at random orientations.

use std::fs;
use std::path::Path;

use rand::Rng;

use super::{load_corpus, ImageCorpus};
use crate::error::{Error, Result};
use crate::imaging::{save_ppm, RasterImage};
use crate::rng::{rng_from, str_key};

/// Axis-aligned boxes `[x0, x1] x [y0, y1]` in units of the glyph radius.
/// Every corner stays inside the unit circle so rotations never crop.
const GLYPHS: [(&str, &[[f64; 4]]); 3] = [
    ("bar", &[[-0.8, 0.8, -0.18, 0.18]]),
    ("ell", &[[-0.5, -0.2, -0.7, 0.7], [-0.5, 0.6, 0.4, 0.7]]),
    ("tee", &[[-0.65, 0.65, -0.7, -0.4], [-0.15, 0.15, -0.7, 0.7]]),
];

pub fn synthetic_class_names() -> Vec<&'static str> {
    GLYPHS.iter().map(|g| g.0).collect()
}

/// Renders one glyph: a light shape on a dark noisy background, rotated by
/// a uniform angle, with jittered scale, offset and tint.
pub fn render_glyph(class: usize, size: usize, rng: &mut impl Rng) -> RasterImage {
    let boxes = GLYPHS[class].1;
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let scale = rng.random_range(0.8..0.95) * (size as f64 / 2.0 - 1.0);
    let shift = size as f64 * 0.03;
    let (ox, oy) = (rng.random_range(-shift..=shift), rng.random_range(-shift..=shift));
    let fg = [rng.random_range(170..=255u8), rng.random_range(170..=255u8), rng.random_range(170..=255u8)];
    let (s, c) = theta.sin_cos();
    let centre = (size as f64 - 1.0) / 2.0;
    let mut pixels = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let dx = (x as f64 - centre - ox) / scale;
            let dy = (y as f64 - centre - oy) / scale;
            let (u, v) = (c * dx + s * dy, -s * dx + c * dy);
            let inside = boxes.iter().any(|b| u >= b[0] && u <= b[1] && v >= b[2] && v <= b[3]);
            let base = if inside { fg } else { [12, 12, 16] };
            let noise: i16 = rng.random_range(-6..=6);
            pixels.push(base.map(|ch| (ch as i16 + noise).clamp(0, 255) as u8));
        }
    }
    RasterImage::new(size, size, pixels).expect("square canvas")
}

/// Writes `per_class` PPM images of side `size` for each glyph class under
/// `root/<class>/` and loads the result.
pub fn write_synthetic_corpus(root: impl AsRef<Path>, per_class: usize, size: usize, seed: u64) -> Result<ImageCorpus> {
    if per_class == 0 || size < 8 {
        return Err(Error::invalid("need at least one image per class and a side of at least 8"));
    }
    let root = root.as_ref();
    for (class, (name, _)) in GLYPHS.iter().enumerate() {
        let dir = root.join(name);
        fs::create_dir_all(&dir)?;
        let mut rng = rng_from(seed, &[str_key("synth"), str_key(name)]);
        for i in 0..per_class {
            let img = render_glyph(class, size, &mut rng);
            save_ppm(&img, dir.join(format!("{name}_{i:04}.ppm")))?;
        }
    }
    load_corpus(root)
}
