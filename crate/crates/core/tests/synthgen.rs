use proptest::prelude::*;
use shapeseg_core::eval::{confusion, iou};
use shapeseg_core::synthgen::*;
use shapeseg_core::{BinaryMask, GrayImage};
use shapeseg_testkit::{random_image, random_mask};

fn render_with_subject(seed: u64, w: u32, h: u32, threshold: u8) -> (GrayImage, BinaryMask) {
    let mut rng = seeded_rng(seed);
    let mask = random_mask(&mut rng, w, h, 0.4);
    let texture = random_image(&mut rng, w, h);
    let render = GrayImage::from_fn(w, h, |x, y| {
        if mask.get(x, y) {
            texture.get(x, y).max(threshold + 1)
        } else {
            0
        }
    })
    .unwrap();
    (render, mask)
}

#[test]
fn checkerboard_composite_pixelwise() {
    let render = GrayImage::from_fn(10, 6, |x, y| (x * 20 + y) as u8).unwrap();
    let bg = GrayImage::from_fn(10, 6, |x, y| 255 - (x * 3 + y) as u8).unwrap();
    let mask = BinaryMask::from_fn(10, 6, |x, y| (x + y) % 2 == 0).unwrap();
    let out = composite(&render, &mask, &bg).unwrap();
    for y in 0..6 {
        for x in 0..10 {
            let expected = if mask.get(x, y) { render.get(x, y) } else { bg.get(x, y) };
            assert_eq!(out.get(x, y), expected);
        }
    }
}

#[test]
fn masked_pixels_ignore_background() {
    let (render, mask) = render_with_subject(1, 32, 24, 10);
    let bg_a = GrayImage::filled(50, 40, 3).unwrap();
    let bg_b = random_image(&mut seeded_rng(2), 17, 90);
    let a = composite(&render, &mask, &bg_a).unwrap();
    let b = composite(&render, &mask, &bg_b).unwrap();
    let diffs = (0..24)
        .flat_map(|y| (0..32).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y) && a.get(x, y) != b.get(x, y))
        .count();
    assert_eq!(diffs, 0);
}

#[test]
fn extract_after_black_composite_round_trips() {
    for seed in 0..10 {
        let (render, mask) = render_with_subject(seed, 20, 15, DEFAULT_MASK_THRESHOLD);
        let black = GrayImage::filled(20, 15, 0).unwrap();
        let out = composite(&render, &mask, &black).unwrap();
        assert_eq!(extract_mask(&out, DEFAULT_MASK_THRESHOLD), mask);
    }
}

#[test]
fn flips_keep_pairs_aligned() {
    for seed in 0..10 {
        let (render, _) = render_with_subject(seed, 21, 13, 10);
        let mask = extract_mask(&render, 10);
        for spec in [
            AugmentationSpec { horizontal_flip: 1.0, ..Default::default() },
            AugmentationSpec { vertical_flip: 1.0, ..Default::default() },
        ] {
            let (img, m) = augment(&render, &mask, &spec).unwrap();
            let c = confusion(&extract_mask(&img, 10), &m).unwrap();
            assert_eq!(iou(&c), 1.0);
        }
    }
}

#[test]
fn manifests_stay_in_range() {
    let catalog = CatalogSizes { meshes: 14, backgrounds: 1000 };
    for seed in 0..20_000 {
        let m = sample_manifest(seed, catalog).unwrap();
        m.validate(&catalog).unwrap();
        assert!(m.light_intensities.iter().all(|l| (0.2..=2.0).contains(l)));
    }
}

#[test]
fn manifest_covers_catalogs() {
    let catalog = CatalogSizes { meshes: 3, backgrounds: 2 };
    let mut meshes = [false; 3];
    let mut cams = [false; 16];
    for seed in 0..300 {
        let m = sample_manifest(seed, catalog).unwrap();
        meshes[m.mesh_id] = true;
        for c in m.camera_ids {
            cams[c as usize] = true;
        }
    }
    assert!(meshes.iter().all(|&b| b));
    assert!(cams.iter().all(|&b| b));
}

proptest! {
    #[test]
    fn augmentation_is_seed_deterministic(seed in any::<u64>()) {
        let (render, mask) = render_with_subject(seed, 16, 12, 10);
        let spec = AugmentationSpec::standard(seed);
        let a = augment(&render, &mask, &spec).unwrap();
        let b = augment(&render, &mask, &spec).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn split_partitions_exactly(n in 1usize..300, fraction in 0.01f64..0.99, seed in any::<u64>()) {
        let ids: Vec<usize> = (0..n).collect();
        let s = split_dataset(&ids, fraction, seed).unwrap();
        prop_assert_eq!(s.train.len(), train_count(n, fraction));
        let mut all: Vec<usize> = s.train.iter().chain(&s.val).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, ids);
    }
}
