use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use rotvote::descriptors::{
    canny, extract, extract_autocolor, extract_edgehist, extract_fuzzyopp, extract_phog, CannyConfig,
    DescriptorConfig, DescriptorKind,
};
use rotvote::imaging::{flip_horizontal, RasterImage};

fn step_image(n: usize) -> RasterImage {
    RasterImage::from_fn(n, n, |x, _| if x < n / 2 { [0; 3] } else { [255; 3] }).unwrap()
}

/// Blurred 1-D step profile computed directly from the Gaussian formula.
fn analytic_step_profile(n: usize, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let weights: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = weights.iter().sum();
    (0..n as i64)
        .map(|x| {
            (-r..=r)
                .map(|i| {
                    let sx = (x + i).clamp(0, n as i64 - 1);
                    let v = if (sx as usize) < n / 2 { 0.0 } else { 255.0 };
                    weights[(i + r) as usize] / norm * v
                })
                .sum()
        })
        .collect()
}

#[test]
fn canny_step_matches_analytic_sobel() {
    let n = 32;
    let img = step_image(n);
    let cfg = CannyConfig::default();
    let e = canny(&img, &cfg);
    let profile = analytic_step_profile(n, cfg.gaussian_sigma);
    let sobel = |x: usize| {
        let l = profile[x.saturating_sub(1)];
        let r = profile[(x + 1).min(n - 1)];
        4.0 * (r - l)
    };

    assert!(e.edge_count() > 0);
    let mut cols = BTreeSet::new();
    for (x, y, theta, mag) in e.edge_pixels() {
        cols.insert(x);
        assert!(theta.abs() < 1e-6 || (PI - theta).abs() < 1e-6, "orientation {theta} at ({x},{y})");
        assert!((mag - sobel(x)).abs() < 1e-6, "magnitude {mag} vs {}", sobel(x));
    }
    // The two columns either side of the step carry identical maxima.
    assert_eq!(cols, BTreeSet::from([15, 16]));
    assert_eq!(e.edge_count(), 2 * n);
}

/// Straightforward Canny: direct 2-D Gaussian, Sobel, NMS, hysteresis by
/// repeated sweeps until nothing changes.
fn reference_canny(img: &RasterImage, cfg: &CannyConfig) -> BTreeSet<(usize, usize)> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let gray: Vec<f64> = img
        .pixels()
        .iter()
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect();
    let s = cfg.gaussian_sigma;
    let r = (3.0 * s).ceil() as i64;
    let g1: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * s * s)).exp()).collect();
    let norm: f64 = g1.iter().sum();
    let at = |v: &Vec<f64>, x: i64, y: i64| v[(y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) as usize];
    let mut blurred = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for j in -r..=r {
                for i in -r..=r {
                    acc += g1[(i + r) as usize] * g1[(j + r) as usize] / (norm * norm) * at(&gray, x + i, y + j);
                }
            }
            blurred[(y * w + x) as usize] = acc;
        }
    }
    let mut mag = vec![0.0; (w * h) as usize];
    let mut ang = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let b = |dx: i64, dy: i64| at(&blurred, x + dx, y + dy);
            let gx = b(1, -1) + 2.0 * b(1, 0) + b(1, 1) - b(-1, -1) - 2.0 * b(-1, 0) - b(-1, 1);
            let gy = b(-1, 1) + 2.0 * b(0, 1) + b(1, 1) - b(-1, -1) - 2.0 * b(0, -1) - b(1, -1);
            mag[(y * w + x) as usize] = (gx * gx + gy * gy).sqrt();
            let mut a = gy.atan2(gx).to_degrees();
            if a < 0.0 {
                a += 180.0;
            }
            ang[(y * w + x) as usize] = a % 180.0;
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-9 * max;
    let m = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            mag[(y * w + x) as usize]
        }
    };
    let mut thin = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let a = ang[i];
            let (p, q) = if !(22.5..157.5).contains(&a) {
                ((-1, 0), (1, 0))
            } else if a < 67.5 {
                ((-1, -1), (1, 1))
            } else if a < 112.5 {
                ((0, -1), (0, 1))
            } else {
                ((1, -1), (-1, 1))
            };
            if mag[i] > 0.0 && mag[i] + tol >= m(x + p.0, y + p.1) && mag[i] + tol >= m(x + q.0, y + q.1) {
                thin[i] = mag[i];
            }
        }
    }
    let (lo, hi) = (cfg.low_ratio * max, cfg.high_ratio * max);
    let mut edge: BTreeSet<(usize, usize)> = BTreeSet::new();
    for y in 0..h {
        for x in 0..w {
            if thin[(y * w + x) as usize] >= hi {
                edge.insert((x as usize, y as usize));
            }
        }
    }
    loop {
        let mut grown = false;
        for y in 0..h {
            for x in 0..w {
                let t = thin[(y * w + x) as usize];
                if t < lo || t <= 0.0 || edge.contains(&(x as usize, y as usize)) {
                    continue;
                }
                let touches = (-1..=1).any(|dy: i64| {
                    (-1..=1).any(|dx: i64| edge.contains(&((x + dx) as usize, (y + dy) as usize)))
                });
                if touches {
                    edge.insert((x as usize, y as usize));
                    grown = true;
                }
            }
        }
        if !grown {
            return edge;
        }
    }
}

#[test]
fn canny_point_yields_ring_matching_reference() {
    let n = 15;
    let c = 7;
    let img = RasterImage::from_fn(n, n, |x, y| if x == c && y == c { [255; 3] } else { [0; 3] }).unwrap();
    let cfg = CannyConfig::default();
    let e = canny(&img, &cfg);
    let got: BTreeSet<(usize, usize)> = e.edge_pixels().map(|(x, y, _, _)| (x, y)).collect();
    assert_eq!(got, reference_canny(&img, &cfg));

    assert!(!got.contains(&(c, c)), "center must not be an edge");
    assert!(!got.is_empty());
    for &(x, y) in &got {
        let (dx, dy) = (x as i64 - c as i64, y as i64 - c as i64);
        assert!(dx.abs().max(dy.abs()) <= 4, "edge ({x},{y}) too far from the point");
        // Closed under the eight symmetries of the square.
        for (sx, sy) in [(dx, dy), (-dx, dy), (dx, -dy), (-dx, -dy), (dy, dx), (-dy, dx), (dy, -dx), (-dy, -dx)] {
            let p = ((c as i64 + sx) as usize, (c as i64 + sy) as usize);
            assert!(got.contains(&p), "ring not symmetric: missing {p:?}");
        }
    }
    // Surrounds the point on all four sides.
    assert!(got.iter().any(|&(x, y)| y == c && x < c));
    assert!(got.iter().any(|&(x, y)| y == c && x > c));
    assert!(got.iter().any(|&(x, y)| x == c && y < c));
    assert!(got.iter().any(|&(x, y)| x == c && y > c));
}

#[test]
fn canny_random_images_match_reference() {
    let cfg = CannyConfig::default();
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..4 {
        // Blocky content keeps gradient ties away from the thresholds.
        let blocks: Vec<[u8; 3]> = (0..9).map(|_| [(next() % 256) as u8, (next() % 256) as u8, (next() % 256) as u8]).collect();
        let img = RasterImage::from_fn(12, 10, |x, y| blocks[(y / 4) * 3 + x / 4]).unwrap();
        let got: BTreeSet<_> = canny(&img, &cfg).edge_pixels().map(|(x, y, _, _)| (x, y)).collect();
        assert_eq!(got, reference_canny(&img, &cfg));
    }
}

#[test]
fn autocolor_checkerboard_matches_enumeration() {
    let mut cfg = DescriptorConfig::default();
    cfg.autocolor.distances = vec![1];
    let a = [0u8, 0, 0];
    let b = [255u8, 255, 255];
    let img = RasterImage::from_fn(4, 4, |x, y| if (x + y) % 2 == 0 { a } else { b }).unwrap();
    let f = extract_autocolor(&img, &cfg);

    // Exhaustive enumeration of Chebyshev-1 neighbor pairs.
    let ratio = |color: [u8; 3]| {
        let (mut same, mut total) = (0, 0);
        for y in 0..4i64 {
            for x in 0..4i64 {
                if img.get(x as usize, y as usize) != color {
                    continue;
                }
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        if (dx, dy) == (0, 0) {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if (0..4).contains(&nx) && (0..4).contains(&ny) {
                            total += 1;
                            if img.get(nx as usize, ny as usize) == color {
                                same += 1;
                            }
                        }
                    }
                }
            }
        }
        same as f64 / total as f64
    };
    let black_bin = 0;
    let white_bin = 63;
    assert_eq!(f.values()[black_bin], ratio(a));
    assert_eq!(f.values()[white_bin], ratio(b));
    // Diagonal neighbors share the color: 9 same out of 21 for each color here.
    assert_eq!(ratio(a), 9.0 / 21.0);
    let rest: f64 = f.values().iter().enumerate().filter(|(i, _)| *i != 0 && *i != 63).map(|(_, v)| v).sum();
    assert_eq!(rest, 0.0);
}

#[test]
fn edgehist_step_concentrates_in_zero_bin_of_center_columns() {
    let img = step_image(32);
    let cfg = DescriptorConfig::default();
    let f = extract_edgehist(&img, &cfg);
    assert_eq!(f.len(), 128);
    assert!((f.values().iter().sum::<f64>() - 1.0).abs() < 1e-9);

    // Oracle: count edge pixels per sub-image from the edge map.
    let e = canny(&img, &cfg.canny);
    let mut counts = [0.0; 16];
    for (x, y, _, _) in e.edge_pixels() {
        counts[(y * 4 / 32) * 4 + x * 4 / 32] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    for (i, v) in f.values().iter().enumerate() {
        let (cell, bin) = (i / 8, i % 8);
        let expected = if bin == 0 { counts[cell] / total } else { 0.0 };
        assert!((v - expected).abs() < 1e-12, "index {i}");
        if *v > 0.0 {
            assert!(matches!(cell % 4, 1 | 2), "mass outside the step columns at cell {cell}");
        }
    }
}

#[test]
fn constant_images_give_zero_edge_and_phog() {
    let img = RasterImage::filled(20, 20, [33, 66, 99]).unwrap();
    let cfg = DescriptorConfig::default();
    assert!(extract_edgehist(&img, &cfg).values().iter().all(|&v| v == 0.0));
    let p = extract_phog(&img, &cfg);
    assert_eq!(p.len(), 168);
    assert!(p.values().iter().all(|&v| v == 0.0));
}

#[test]
fn fuzzy_mid_gray_by_hand() {
    let img = RasterImage::filled(3, 2, [128, 128, 128]).unwrap();
    let cfg = DescriptorConfig::default();
    let f = extract_fuzzyopp(&img, &cfg);
    // u1 = u2 = 0.5 sit halfway between centers 1/3 and 2/3; u3 = 384/765.
    let u3: f64 = 384.0 / 765.0;
    let third: f64 = 1.0 / 3.0;
    let m3_1 = 1.0 - (u3 - third) / third;
    let m3_2 = 1.0 - (2.0 * third - u3) / third;
    assert!((m3_1 + m3_2 - 1.0).abs() < 1e-12);
    let mut expected = vec![0.0; 64];
    for i in [1, 2] {
        for j in [1, 2] {
            expected[(i * 4 + j) * 4 + 1] = 0.25 * m3_1;
            expected[(i * 4 + j) * 4 + 2] = 0.25 * m3_2;
        }
    }
    for (a, b) in f.values().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn fuzzy_is_pixel_order_free() {
    let px: Vec<[u8; 3]> = (0..24).map(|i| [(i * 11) as u8, (i * 37 % 256) as u8, (255 - i * 5) as u8]).collect();
    let mut shuffled = px.clone();
    shuffled.reverse();
    shuffled.swap(3, 17);
    let a = RasterImage::new(6, 4, px).unwrap();
    let b = RasterImage::new(4, 6, shuffled).unwrap();
    let cfg = DescriptorConfig::default();
    let fa = extract_fuzzyopp(&a, &cfg);
    let fb = extract_fuzzyopp(&b, &cfg);
    for (x, y) in fa.values().iter().zip(fb.values()) {
        assert!((x - y).abs() < 1e-15);
    }
}

#[test]
fn phog_step_matches_per_pixel_accumulation() {
    let img = step_image(32);
    let cfg = DescriptorConfig::default();
    let f = extract_phog(&img, &cfg);
    let e = canny(&img, &cfg.canny);

    // Brute force: visit every pixel, every level, every cell.
    let mut expected = vec![0.0; 168];
    let mut offset = 0;
    for level in 0..=2u32 {
        let side = 2usize.pow(level);
        for cy in 0..side {
            for cx in 0..side {
                for y in 0..32 {
                    for x in 0..32 {
                        if x * side / 32 != cx || y * side / 32 != cy {
                            continue;
                        }
                        if let Some(theta) = e.orientation(x, y) {
                            let bin = ((theta / PI * 8.0) as usize).min(7);
                            expected[offset + (cy * side + cx) * 8 + bin] += e.magnitude(x, y);
                        }
                    }
                }
            }
        }
        offset += side * side * 8;
    }
    let total: f64 = expected.iter().sum();
    expected.iter_mut().for_each(|v| *v /= total);
    for (a, b) in f.values().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }

    // Level 0: all mass in the 0-rad bin.
    let level0: f64 = f.values()[..8].iter().sum();
    assert!(f.values()[0] > 0.0 && (f.values()[0] - level0).abs() < 1e-15);
    // Level 1: only the 0-rad bin of cells that touch the step column.
    for cell in 0..4 {
        for bin in 0..8 {
            let v = f.values()[8 + cell * 8 + bin];
            if bin != 0 {
                assert_eq!(v, 0.0);
            } else {
                assert!(v > 0.0);
            }
        }
    }
    // Level 2: only the two inner columns of the 4x4 grid.
    for cell in 0..16 {
        let mass: f64 = f.values()[40 + cell * 8..48 + cell * 8].iter().sum();
        assert_eq!(mass > 0.0, matches!(cell % 4, 1 | 2), "cell {cell}");
    }
}

#[test]
fn autocolor_solid_unchanged_by_flip() {
    let img = RasterImage::filled(7, 5, [10, 200, 30]).unwrap();
    let cfg = DescriptorConfig::default();
    assert_eq!(extract_autocolor(&img, &cfg), extract_autocolor(&flip_horizontal(&img), &cfg));
}

fn arb_image() -> impl Strategy<Value = RasterImage> {
    (1usize..14, 1usize..14).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::array::uniform3(any::<u8>()), w * h)
            .prop_map(move |px| RasterImage::new(w, h, px).unwrap())
    })
}

fn arb_config() -> impl Strategy<Value = DescriptorConfig> {
    (
        1usize..6,
        prop::collection::vec(1usize..6, 1..4),
        1usize..5,
        1usize..10,
        1usize..6,
        1usize..10,
        0usize..4,
    )
        .prop_map(|(levels, distances, grid, ebins, fbins, pbins, plevels)| {
            let mut cfg = DescriptorConfig::default();
            cfg.autocolor.levels_per_channel = levels;
            cfg.autocolor.distances = distances;
            cfg.edge.grid = grid;
            cfg.edge.orientation_bins = ebins;
            cfg.fuzzy.bins_per_axis = fbins;
            cfg.phog.orientation_bins = pbins;
            cfg.phog.pyramid_levels = plevels;
            cfg
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptor_contracts_hold(img in arb_image(), cfg in arb_config()) {
        prop_assert!(cfg.validate().is_ok());
        for kind in DescriptorKind::ALL {
            let f = extract(kind, &img, &cfg);
            prop_assert_eq!(f.len(), cfg.dimension(kind));
            prop_assert!(f.values().iter().all(|v| v.is_finite() && *v >= 0.0));
            if kind.is_histogram() {
                let s: f64 = f.values().iter().sum();
                prop_assert!(s == 0.0 || (s - 1.0).abs() < 1e-9, "{:?} sums to {}", kind, s);
            } else {
                prop_assert!(f.values().iter().all(|v| *v <= 1.0));
            }
            // Pure: same input, same output.
            prop_assert_eq!(&f, &extract(kind, &img, &cfg));
        }
        // Fuzzy memberships always produce mass.
        let s: f64 = extract_fuzzyopp(&img, &cfg).values().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-9);
    }
}
