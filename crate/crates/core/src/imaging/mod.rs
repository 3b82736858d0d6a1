//! Pixel grids, geometric transforms and the 8-variant augmentation group.

mod io;
mod transform;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use io::{decode_image, encode_ppm, load_image, read_ppm, save_ppm};
pub use transform::{
    flip, flip_horizontal, flip_vertical, modal_border_color, rotate, rotate_with, FlipAxis,
    Sampling,
};

pub type Rgb = [u8; 3];

/// Number of images in an augmentation group.
pub const GROUP_SIZE: usize = 8;

/// Anticlockwise rotations applied to every original, in group order.
pub const ROTATION_ANGLES: [f64; 3] = [30.0, 60.0, 90.0];

/// Names of the group slots, in canonical order.
pub const VARIANT_NAMES: [&str; GROUP_SIZE] = [
    "original",
    "rot30",
    "rot60",
    "rot90",
    "flip",
    "flip_rot30",
    "flip_rot60",
    "flip_rot90",
];

/// 8-bit RGB image stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: Rgb) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    /// Replicates a single gray channel across R, G and B.
    pub fn from_gray(width: usize, height: usize, gray: &[u8]) -> Result<Self> {
        Self::new(width, height, gray.iter().map(|&g| [g, g, g]).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// Hex SHA-256 over dimensions and pixel bytes.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.width as u64).to_le_bytes());
        hasher.update((self.height as u64).to_le_bytes());
        for px in &self.pixels {
            hasher.update(px);
        }
        hex::encode(hasher.finalize())
    }
}

/// Color written into destination pixels whose source lies outside the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FillColor(pub Rgb);

impl FillColor {
    pub const BLACK: FillColor = FillColor([0, 0, 0]);
}

impl Default for FillColor {
    fn default() -> Self {
        Self::BLACK
    }
}

/// How the background fill is chosen for rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMode {
    Color(FillColor),
    /// Most frequent color along the image border.
    Border,
}

impl Default for FillMode {
    fn default() -> Self {
        FillMode::Color(FillColor::BLACK)
    }
}

impl FillMode {
    pub fn resolve(&self, image: &RasterImage) -> FillColor {
        match self {
            FillMode::Color(c) => *c,
            FillMode::Border => modal_border_color(image),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    pub fill: FillMode,
    pub flip: FlipAxis,
    pub sampling: Sampling,
}

/// An original image together with its rotated and mirrored variants.
///
/// Slot order is fixed: original, rot30, rot60, rot90, then the mirror of
/// each of those four in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedGroup {
    pub source_id: String,
    pub label: usize,
    variants: [RasterImage; GROUP_SIZE],
}

impl AugmentedGroup {
    pub fn variants(&self) -> &[RasterImage; GROUP_SIZE] {
        &self.variants
    }

    pub fn original(&self) -> &RasterImage {
        &self.variants[0]
    }
}

/// Builds the group with a fixed fill color, horizontal mirror and
/// nearest-neighbor sampling.
pub fn build_group(
    image: &RasterImage,
    source_id: impl Into<String>,
    label: usize,
    fill: FillColor,
) -> AugmentedGroup {
    let cfg = AugmentConfig {
        fill: FillMode::Color(fill),
        ..AugmentConfig::default()
    };
    build_group_with(image, source_id, label, &cfg)
}

pub fn build_group_with(
    image: &RasterImage,
    source_id: impl Into<String>,
    label: usize,
    cfg: &AugmentConfig,
) -> AugmentedGroup {
    let fill = cfg.fill.resolve(image);
    let rotated = ROTATION_ANGLES.map(|a| transform::rotate_finite(image, a, fill, cfg.sampling));
    let upright = [image.clone(), rotated[0].clone(), rotated[1].clone(), rotated[2].clone()];
    let mirrored = upright.clone().map(|img| flip(&img, cfg.flip));
    let [a, b, c, d] = upright;
    let [e, f, g, h] = mirrored;
    AugmentedGroup {
        source_id: source_id.into(),
        label,
        variants: [a, b, c, d, e, f, g, h],
    }
}
