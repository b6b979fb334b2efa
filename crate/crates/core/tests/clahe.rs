use proptest::prelude::*;
use shapeseg_core::preprocess::{clahe, clip_histogram, clip_limit, equalization_map, ClaheParams, Histogram};
use shapeseg_core::synthgen::seeded_rng;
use shapeseg_core::GrayImage;
use shapeseg_testkit::{clahe_reference, global_equalization, random_image};

#[test]
fn matches_reference_on_odd_sizes() {
    let mut rng = seeded_rng(0x5eed);
    for &(w, h) in &[(67, 53), (9, 8), (31, 64), (8, 8)] {
        for &(cols, rows) in &[(1, 1), (2, 3), (8, 8)] {
            for &clip in &[0.5, 2.0, 4.0, 1000.0] {
                let img = random_image(&mut rng, w, h);
                let params = ClaheParams::new(cols, rows, clip).unwrap();
                let fast = clahe(&img, &params).unwrap();
                let slow = clahe_reference(&img, cols as usize, rows as usize, clip);
                assert_eq!(fast.data(), &slow[..], "{w}x{h} grid {cols}x{rows} clip {clip}");
            }
        }
    }
}

#[test]
fn single_tile_without_clipping_is_global_equalization() {
    let mut rng = seeded_rng(17);
    for _ in 0..20 {
        let img = random_image(&mut rng, 40, 30);
        let out = clahe(&img, &ClaheParams::new(1, 1, 256.0).unwrap()).unwrap();
        assert_eq!(out.data(), &global_equalization(&img)[..]);
    }
}

#[test]
fn uniform_input_gives_uniform_output() {
    let img = GrayImage::filled(64, 64, 128).unwrap();
    let out = clahe(&img, &ClaheParams::new(8, 8, 2.0).unwrap()).unwrap();
    let reference = clahe_reference(&img, 8, 8, 2.0);
    assert_eq!(out.data(), &reference[..]);
    assert!(out.data().iter().all(|&v| v == out.data()[0]));
}

fn histogram_strategy() -> impl Strategy<Value = Histogram> {
    prop::collection::vec(0u32..500, 256).prop_map(|v| v.try_into().unwrap())
}

proptest! {
    #[test]
    fn clipping_conserves_mass(mut hist in histogram_strategy(), clip in 0.1f64..50.0) {
        let total: u32 = hist.iter().sum();
        clip_histogram(&mut hist, clip_limit(clip, total as usize));
        prop_assert_eq!(hist.iter().sum::<u32>(), total);
    }

    #[test]
    fn mapping_is_monotone_and_bounded(hist in histogram_strategy()) {
        let map = equalization_map(&hist);
        prop_assert!(map.windows(2).all(|w| w[0] <= w[1]));
        if hist.iter().any(|&c| c > 0) {
            prop_assert_eq!(map[255], 255);
        }
    }

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let img = random_image(&mut seeded_rng(seed), 24, 20);
        let p = ClaheParams::new(2, 2, 3.0).unwrap();
        prop_assert_eq!(clahe(&img, &p).unwrap(), clahe(&img, &p).unwrap());
    }
}
