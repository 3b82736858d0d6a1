use super::{canny, l1_normalize, orientation_bin, DescriptorConfig, DescriptorKind, FeatureVector};
use crate::imaging::RasterImage;

/// Pyramid histogram of oriented gradients.
///
/// Level `l` splits the image into `2^l x 2^l` cells; each Canny edge pixel
/// adds its gradient magnitude to the orientation bin of its cell at every
/// level. Levels are concatenated coarse to fine, cells row-major, and the
/// full vector is L1-normalized.
pub fn extract_phog(image: &RasterImage, cfg: &DescriptorConfig) -> FeatureVector {
    let bins = cfg.phog.orientation_bins;
    let (w, h) = (image.width(), image.height());
    let edges = canny(image, &cfg.canny);

    let mut values = vec![0.0; cfg.dimension(DescriptorKind::Phog)];
    let mut offset = 0;
    for level in 0..=cfg.phog.pyramid_levels {
        let side = 1usize << level;
        for (x, y, theta, mag) in edges.edge_pixels() {
            let cell = (y * side / h) * side + x * side / w;
            values[offset + cell * bins + orientation_bin(theta, bins)] += mag;
        }
        offset += side * side * bins;
    }
    l1_normalize(&mut values);
    FeatureVector::new(DescriptorKind::Phog, values)
}
