use super::{l1_normalize, DescriptorConfig, DescriptorKind, FeatureVector};
use crate::imaging::RasterImage;

/// Triangular memberships of `u` in `bins` sets with centers spread
/// uniformly over `[0, 1]`. They sum to 1 for any `u` in `[0, 1]`.
pub fn triangular_memberships(u: f64, bins: usize) -> Vec<f64> {
    if bins == 1 {
        return vec![1.0];
    }
    let spacing = 1.0 / (bins - 1) as f64;
    (0..bins)
        .map(|k| (1.0 - (u - k as f64 * spacing).abs() / spacing).max(0.0))
        .collect()
}

/// Fuzzy histogram in opponent color space.
///
/// `O1 = (R-G)/sqrt2`, `O2 = (R+G-2B)/sqrt6`, `O3 = (R+G+B)/sqrt3`, each
/// rescaled to `[0, 1]` by its extremes over the 8-bit cube. Every pixel
/// spreads unit mass over the joint bins as the outer product of its three
/// per-axis membership vectors (index `(i1 * n + i2) * n + i3`).
pub fn extract_fuzzyopp(image: &RasterImage, cfg: &DescriptorConfig) -> FeatureVector {
    let n = cfg.fuzzy.bins_per_axis;
    let mut values = vec![0.0; n * n * n];
    for p in image.pixels() {
        let [u1, u2, u3] = opponent_unit(*p);
        let m1 = triangular_memberships(u1, n);
        let m2 = triangular_memberships(u2, n);
        let m3 = triangular_memberships(u3, n);
        for (i, a) in m1.iter().enumerate().filter(|(_, a)| **a > 0.0) {
            for (j, b) in m2.iter().enumerate().filter(|(_, b)| **b > 0.0) {
                let ab = a * b;
                for (k, c) in m3.iter().enumerate().filter(|(_, c)| **c > 0.0) {
                    values[(i * n + j) * n + k] += ab * c;
                }
            }
        }
    }
    l1_normalize(&mut values);
    FeatureVector::new(DescriptorKind::Fuzzy, values)
}

/// Opponent axes rescaled to the unit interval.
pub(crate) fn opponent_unit(p: [u8; 3]) -> [f64; 3] {
    let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let s3 = 3f64.sqrt();
    let o1 = (r - g) / s2;
    let o2 = (r + g - 2.0 * b) / s6;
    let o3 = (r + g + b) / s3;
    let (o1_max, o2_max, o3_max) = (255.0 / s2, 510.0 / s6, 765.0 / s3);
    [
        ((o1 + o1_max) / (2.0 * o1_max)).clamp(0.0, 1.0),
        ((o2 + o2_max) / (2.0 * o2_max)).clamp(0.0, 1.0),
        (o3 / o3_max).clamp(0.0, 1.0),
    ]
}
