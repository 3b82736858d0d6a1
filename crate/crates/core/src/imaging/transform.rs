use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FillColor, RasterImage, Rgb};
use crate::error::{Error, Result};

/// Slack when testing whether an inverse-mapped source coordinate lies on
/// the pixel-center hull `[0, w-1] x [0, h-1]`.
const HULL_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    Nearest,
    Bilinear,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipAxis {
    #[default]
    Horizontal,
    Vertical,
}

/// Rotates anticlockwise about `((w-1)/2, (h-1)/2)` keeping the canvas size.
pub fn rotate(image: &RasterImage, angle_degrees: f64, fill: FillColor) -> Result<RasterImage> {
    rotate_with(image, angle_degrees, fill, Sampling::Nearest)
}

pub fn rotate_with(
    image: &RasterImage,
    angle_degrees: f64,
    fill: FillColor,
    sampling: Sampling,
) -> Result<RasterImage> {
    if !angle_degrees.is_finite() {
        return Err(Error::invalid(format!(
            "rotation angle must be finite, got {angle_degrees}"
        )));
    }
    Ok(rotate_finite(image, angle_degrees, fill, sampling))
}

pub(super) fn rotate_finite(
    image: &RasterImage,
    angle_degrees: f64,
    fill: FillColor,
    sampling: Sampling,
) -> RasterImage {
    let turns = angle_degrees / 90.0;
    if turns.fract() == 0.0 {
        let quarter = (turns % 4.0 + 4.0) % 4.0;
        return rotate_quarters(image, quarter as u8, fill);
    }
    rotate_sampled(image, angle_degrees.to_radians(), fill, sampling)
}

/// Exact rotation by `quarter * 90` degrees using integer arithmetic on
/// doubled coordinates. On non-square canvases, sources that land between
/// two pixels take the lower one.
fn rotate_quarters(image: &RasterImage, quarter: u8, fill: FillColor) -> RasterImage {
    if quarter == 0 {
        return image.clone();
    }
    let (w, h) = (image.width() as i64, image.height() as i64);
    let mut out = Vec::with_capacity(image.pixels().len());
    for y in 0..h {
        for x in 0..w {
            let dx = 2 * x - (w - 1);
            let dy = 2 * y - (h - 1);
            let (sx2, sy2) = match quarter {
                1 => (-dy, dx),
                2 => (-dx, -dy),
                _ => (dy, -dx),
            };
            let sx = (sx2 + (w - 1)).div_euclid(2);
            let sy = (sy2 + (h - 1)).div_euclid(2);
            if (0..w).contains(&sx) && (0..h).contains(&sy) {
                out.push(image.get(sx as usize, sy as usize));
            } else {
                out.push(fill.0);
            }
        }
    }
    RasterImage::new(image.width(), image.height(), out).expect("same dimensions")
}

fn rotate_sampled(image: &RasterImage, theta: f64, fill: FillColor, sampling: Sampling) -> RasterImage {
    let (w, h) = (image.width(), image.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let (sin, cos) = theta.sin_cos();
    let (max_x, max_y) = (w as f64 - 1.0, h as f64 - 1.0);

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let dy = y as f64 - cy;
        for x in 0..w {
            let dx = x as f64 - cx;
            // Inverse of a visual anticlockwise turn with y pointing down.
            let sx = cx + dx * cos - dy * sin;
            let sy = cy + dx * sin + dy * cos;
            let inside = sx >= -HULL_EPS
                && sx <= max_x + HULL_EPS
                && sy >= -HULL_EPS
                && sy <= max_y + HULL_EPS;
            if !inside {
                out.push(fill.0);
                continue;
            }
            let px = match sampling {
                Sampling::Nearest => {
                    let ix = (sx.round().max(0.0) as usize).min(w - 1);
                    let iy = (sy.round().max(0.0) as usize).min(h - 1);
                    image.get(ix, iy)
                }
                Sampling::Bilinear => bilinear(image, sx.clamp(0.0, max_x), sy.clamp(0.0, max_y)),
            };
            out.push(px);
        }
    }
    RasterImage::new(w, h, out).expect("same dimensions")
}

fn bilinear(image: &RasterImage, sx: f64, sy: f64) -> Rgb {
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let x1 = (x0 + 1).min(image.width() - 1);
    let y1 = (y0 + 1).min(image.height() - 1);
    let (fx, fy) = (sx - x0 as f64, sy - y0 as f64);
    let (p00, p10, p01, p11) = (image.get(x0, y0), image.get(x1, y0), image.get(x0, y1), image.get(x1, y1));
    let mut out = [0u8; 3];
    for c in 0..3 {
        let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
        let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
        out[c] = (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Mirrors columns: `x -> w-1-x`.
pub fn flip_horizontal(image: &RasterImage) -> RasterImage {
    let w = image.width();
    RasterImage::from_fn(w, image.height(), |x, y| image.get(w - 1 - x, y)).expect("same dimensions")
}

/// Mirrors rows: `y -> h-1-y`.
pub fn flip_vertical(image: &RasterImage) -> RasterImage {
    let h = image.height();
    RasterImage::from_fn(image.width(), h, |x, y| image.get(x, h - 1 - y)).expect("same dimensions")
}

pub fn flip(image: &RasterImage, axis: FlipAxis) -> RasterImage {
    match axis {
        FlipAxis::Horizontal => flip_horizontal(image),
        FlipAxis::Vertical => flip_vertical(image),
    }
}

/// Most frequent color on the outermost ring of pixels; ties go to the
/// lexicographically smallest RGB triple.
pub fn modal_border_color(image: &RasterImage) -> FillColor {
    let (w, h) = (image.width(), image.height());
    let mut counts: BTreeMap<Rgb, usize> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                *counts.entry(image.get(x, y)).or_default() += 1;
            }
        }
    }
    let mut best = ([0u8; 3], 0usize);
    for (rgb, n) in counts {
        if n > best.1 {
            best = (rgb, n);
        }
    }
    FillColor(best.0)
}
