use super::{canny, l1_normalize, orientation_bin, DescriptorConfig, DescriptorKind, FeatureVector};
use crate::imaging::RasterImage;

/// Edge-orientation histogram over a `grid x grid` partition.
///
/// Each Canny edge pixel adds one count to the orientation bin of its
/// sub-image. Sub-images are concatenated row-major and the whole vector is
/// L1-normalized; an image without edges yields all zeros.
pub fn extract_edgehist(image: &RasterImage, cfg: &DescriptorConfig) -> FeatureVector {
    let grid = cfg.edge.grid;
    let bins = cfg.edge.orientation_bins;
    let (w, h) = (image.width(), image.height());
    let edges = canny(image, &cfg.canny);

    let mut values = vec![0.0; grid * grid * bins];
    for (x, y, theta, _) in edges.edge_pixels() {
        let cell = (y * grid / h) * grid + x * grid / w;
        values[cell * bins + orientation_bin(theta, bins)] += 1.0;
    }
    l1_normalize(&mut values);
    FeatureVector::new(DescriptorKind::Edge, values)
}
