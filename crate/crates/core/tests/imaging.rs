use proptest::prelude::*;

use rotvote::imaging::{
    build_group, decode_image, encode_ppm, flip_horizontal, rotate, FillColor, RasterImage, GROUP_SIZE,
};

fn arb_image(max_side: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::array::uniform3(any::<u8>()), w * h)
            .prop_map(move |px| RasterImage::new(w, h, px).unwrap())
    })
}

fn arb_square(max_side: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max_side).prop_flat_map(|n| {
        prop::collection::vec(prop::array::uniform3(any::<u8>()), n * n)
            .prop_map(move |px| RasterImage::new(n, n, px).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_has_eight_same_size_variants_in_order(img in arb_image(20), fill in prop::array::uniform3(any::<u8>())) {
        let fill = FillColor(fill);
        let g = build_group(&img, "x", 0, fill);
        prop_assert_eq!(g.variants().len(), GROUP_SIZE);
        for v in g.variants() {
            prop_assert_eq!((v.width(), v.height()), (img.width(), img.height()));
        }
        prop_assert_eq!(&g.variants()[0], &img);
        for (i, angle) in [30.0, 60.0, 90.0].into_iter().enumerate() {
            prop_assert_eq!(&g.variants()[i + 1], &rotate(&img, angle, fill).unwrap());
        }
        for i in 0..4 {
            prop_assert_eq!(&g.variants()[i + 4], &flip_horizontal(&g.variants()[i]));
        }
    }

    #[test]
    fn four_quarter_turns_are_the_identity(img in arb_square(24)) {
        let mut r = img.clone();
        for _ in 0..4 {
            r = rotate(&r, 90.0, FillColor::BLACK).unwrap();
        }
        prop_assert_eq!(r, img);
    }

    #[test]
    fn double_flip_is_the_identity(img in arb_image(20)) {
        prop_assert_eq!(flip_horizontal(&flip_horizontal(&img)), img);
    }

    #[test]
    fn rotation_only_adds_fill(img in arb_image(16), angle in -360.0f64..360.0) {
        // Every output pixel is either the fill or some input pixel.
        let fill = [1, 254, 7];
        let out = rotate(&img, angle, FillColor(fill)).unwrap();
        for p in out.pixels() {
            prop_assert!(*p == fill || img.pixels().contains(p));
        }
    }

    #[test]
    fn ppm_roundtrip(img in arb_image(12)) {
        prop_assert_eq!(decode_image(&encode_ppm(&img)).unwrap(), img);
    }
}

#[test]
fn thirty_degrees_fills_the_corners_of_a_square() {
    let img = RasterImage::filled(21, 21, [200, 10, 10]).unwrap();
    let fill = FillColor([0, 0, 255]);
    for angle in [30.0, 60.0] {
        let r = rotate(&img, angle, fill).unwrap();
        for (x, y) in [(0, 0), (20, 0), (0, 20), (20, 20)] {
            assert_eq!(r.get(x, y), fill.0, "corner ({x},{y}) at {angle}");
        }
        assert_eq!(r.get(10, 10), [200, 10, 10]);
        let filled = r.pixels().iter().filter(|p| **p == fill.0).count();
        assert!(filled > 0 && filled < 21 * 21 / 2);
    }
}
