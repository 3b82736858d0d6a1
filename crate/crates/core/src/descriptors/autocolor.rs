use super::{DescriptorConfig, DescriptorKind, FeatureVector};
use crate::imaging::RasterImage;

/// Color autocorrelogram.
///
/// RGB is quantized to `levels^3` colors. For color `c` and distance `d`
/// the value is the fraction of in-bounds neighbors at Chebyshev distance
/// exactly `d` from a `c`-colored pixel that are also `c`-colored. Output
/// is color-major: index `c * distances.len() + k`.
pub fn extract_autocolor(image: &RasterImage, cfg: &DescriptorConfig) -> FeatureVector {
    let levels = cfg.autocolor.levels_per_channel;
    let distances = &cfg.autocolor.distances;
    let colors = levels.pow(3);
    let (w, h) = (image.width() as i64, image.height() as i64);

    let q = |v: u8| v as usize * levels / 256;
    let quantized: Vec<usize> = image
        .pixels()
        .iter()
        .map(|p| (q(p[0]) * levels + q(p[1])) * levels + q(p[2]))
        .collect();

    let nd = distances.len();
    let mut same = vec![0u64; colors * nd];
    let mut total = vec![0u64; colors * nd];
    for y in 0..h {
        for x in 0..w {
            let c = quantized[(y * w + x) as usize];
            for (k, &d) in distances.iter().enumerate() {
                let d = d as i64;
                let (mut s, mut t) = (0u64, 0u64);
                let mut visit = |nx: i64, ny: i64| {
                    if nx >= 0 && ny >= 0 && nx < w && ny < h {
                        t += 1;
                        if quantized[(ny * w + nx) as usize] == c {
                            s += 1;
                        }
                    }
                };
                for dx in -d..=d {
                    visit(x + dx, y - d);
                    visit(x + dx, y + d);
                }
                for dy in (-d + 1)..d {
                    visit(x - d, y + dy);
                    visit(x + d, y + dy);
                }
                same[c * nd + k] += s;
                total[c * nd + k] += t;
            }
        }
    }

    let values = same
        .iter()
        .zip(&total)
        .map(|(&s, &t)| if t == 0 { 0.0 } else { s as f64 / t as f64 })
        .collect();
    FeatureVector::new(DescriptorKind::AutoColor, values)
}
