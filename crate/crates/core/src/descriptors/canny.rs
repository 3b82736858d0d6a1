//! Canny edge detection on the luma channel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::imaging::RasterImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CannyConfig {
    pub gaussian_sigma: f64,
    /// Weak threshold as a fraction of the maximum gradient magnitude.
    pub low_ratio: f64,
    /// Strong threshold as a fraction of the maximum gradient magnitude.
    pub high_ratio: f64,
}

impl Default for CannyConfig {
    fn default() -> Self {
        Self {
            gaussian_sigma: 1.4,
            low_ratio: 0.1,
            high_ratio: 0.3,
        }
    }
}

/// Binary edge set plus per-pixel gradient data.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    edge: Vec<bool>,
    orientation: Vec<f64>,
    magnitude: Vec<f64>,
}

impl EdgeMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.edge[y * self.width + x]
    }

    /// Gradient orientation in `[0, pi)`, defined only on edge pixels.
    pub fn orientation(&self, x: usize, y: usize) -> Option<f64> {
        let i = y * self.width + x;
        self.edge[i].then(|| self.orientation[i])
    }

    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        self.magnitude[y * self.width + x]
    }

    pub fn edge_count(&self) -> usize {
        self.edge.iter().filter(|&&e| e).count()
    }

    /// `(x, y, orientation, magnitude)` for every edge pixel in row-major order.
    pub fn edge_pixels(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        self.edge.iter().enumerate().filter(|(_, &e)| e).map(move |(i, _)| {
            (i % self.width, i / self.width, self.orientation[i], self.magnitude[i])
        })
    }
}

/// `0.299 R + 0.587 G + 0.114 B` per pixel, in `[0, 255]`.
pub fn luma(image: &RasterImage) -> Vec<f64> {
    image
        .pixels()
        .iter()
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

/// Normalized 1-D Gaussian with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

#[inline]
fn clamp_idx(i: i64, n: usize) -> usize {
    i.clamp(0, n as i64 - 1) as usize
}

/// Separable Gaussian blur with replicated borders.
fn blur(plane: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as i64;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                acc += kv * plane[y * w + clamp_idx(x as i64 + j as i64 - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                acc += kv * tmp[clamp_idx(y as i64 + j as i64 - r, h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// 3x3 Sobel responses with replicated borders.
fn sobel(plane: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: i64, y: i64| plane[clamp_idx(y, h) * w + clamp_idx(x, w)];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) - at(x - 1, y - 1))
                + 2.0 * (at(x + 1, y) - at(x - 1, y))
                + (at(x + 1, y + 1) - at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) - at(x - 1, y - 1))
                + 2.0 * (at(x, y + 1) - at(x, y - 1))
                + (at(x + 1, y + 1) - at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Folds `atan2(gy, gx)` into `[0, pi)`.
pub(crate) fn undirected(gy: f64, gx: f64) -> f64 {
    let mut a = gy.atan2(gx);
    if a < 0.0 {
        a += PI;
    }
    if a >= PI {
        a -= PI;
    }
    a
}

pub fn canny(image: &RasterImage, cfg: &CannyConfig) -> EdgeMap {
    let (w, h) = (image.width(), image.height());
    let blurred = blur(&luma(image), w, h, cfg.gaussian_sigma);
    let (gx, gy) = sobel(&blurred, w, h);
    let magnitude: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let orientation: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| undirected(*b, *a)).collect();

    let max = magnitude.iter().cloned().fold(0.0, f64::max);
    let mut edge = vec![false; w * h];
    if max > 0.0 {
        let thinned = suppress_non_maxima(&magnitude, &orientation, w, h, max);
        hysteresis(&thinned, w, h, cfg.low_ratio * max, cfg.high_ratio * max, &mut edge);
    }
    EdgeMap {
        width: w,
        height: h,
        edge,
        orientation,
        magnitude,
    }
}

fn suppress_non_maxima(mag: &[f64], ori: &[f64], w: usize, h: usize, max: f64) -> Vec<f64> {
    // Plateaus (e.g. the two columns either side of an ideal step) survive.
    let tol = 1e-9 * max;
    let get = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            let m = mag[i];
            if m <= 0.0 {
                continue;
            }
            let deg = ori[i].to_degrees();
            let (a, b) = if !(22.5..157.5).contains(&deg) {
                (get(x - 1, y), get(x + 1, y))
            } else if deg < 67.5 {
                (get(x - 1, y - 1), get(x + 1, y + 1))
            } else if deg < 112.5 {
                (get(x, y - 1), get(x, y + 1))
            } else {
                (get(x + 1, y - 1), get(x - 1, y + 1))
            };
            if m + tol >= a && m + tol >= b {
                out[i] = m;
            }
        }
    }
    out
}

fn hysteresis(thinned: &[f64], w: usize, h: usize, low: f64, high: f64, edge: &mut [bool]) {
    let mut stack = Vec::new();
    for i in 0..w * h {
        if thinned[i] >= high && thinned[i] > 0.0 && !edge[i] {
            edge[i] = true;
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (x, y) = ((j % w) as i64, (j / w) as i64);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let k = ny as usize * w + nx as usize;
                        if !edge[k] && thinned[k] >= low && thinned[k] > 0.0 {
                            edge[k] = true;
                            stack.push(k);
                        }
                    }
                }
            }
        }
    }
}
