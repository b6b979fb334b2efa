use std::fs;
use std::path::Path;

use shapeseg_core::eval::*;
use shapeseg_core::preprocess::PreprocessSettings;
use shapeseg_core::synthgen::seeded_rng;
use shapeseg_core::tensor::{parse_composition, Composition, SHAPE_AWARE};
use shapeseg_core::{read_tensor, BinaryMask, ChannelTag, Error, GrayImage};
use shapeseg_testkit::{confusion_brute, random_image, random_mask, stats_two_pass, write_script};

#[test]
fn confusion_matches_brute_force() {
    let mut rng = seeded_rng(77);
    for _ in 0..200 {
        let pred = random_mask(&mut rng, 16, 16, 0.5);
        let truth = random_mask(&mut rng, 16, 16, 0.3);
        let c = confusion(&pred, &truth).unwrap();
        assert_eq!((c.tp, c.fp, c.fn_, c.tn), confusion_brute(&pred, &truth));
        assert_eq!(c.total(), 256);
        let v = iou(&c);
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn removing_a_false_positive_never_lowers_iou() {
    let mut rng = seeded_rng(78);
    for _ in 0..100 {
        let pred = random_mask(&mut rng, 8, 8, 0.5);
        let truth = random_mask(&mut rng, 8, 8, 0.5);
        let before = iou(&confusion(&pred, &truth).unwrap());
        for i in 0..64 {
            if pred.data()[i] && !truth.data()[i] {
                let mut bits = pred.data().to_vec();
                bits[i] = false;
                let fixed = BinaryMask::new(8, 8, bits).unwrap();
                assert!(iou(&confusion(&fixed, &truth).unwrap()) >= before);
            }
        }
    }
}

#[test]
fn iou_symmetric_when_errors_balance() {
    let a = BinaryMask::new(4, 1, vec![true, true, false, false]).unwrap();
    let b = BinaryMask::new(4, 1, vec![true, false, true, false]).unwrap();
    let ab = confusion(&a, &b).unwrap();
    assert_eq!(ab.fp, ab.fn_);
    assert_eq!(iou(&ab), iou(&confusion(&b, &a).unwrap()));

    let c = BinaryMask::new(4, 1, vec![true, true, true, false]).unwrap();
    let ac = confusion(&a, &c).unwrap();
    assert_ne!(ac.fp, ac.fn_);
    // Swapping roles swaps fp and fn; the ratio is unchanged but the counts are not.
    let ca = confusion(&c, &a).unwrap();
    assert_eq!((ac.fp, ac.fn_), (ca.fn_, ca.fp));
}

#[test]
fn stats_match_two_pass_oracle() {
    let mut rng = seeded_rng(79);
    let images: Vec<GrayImage> = (0..12).map(|_| random_image(&mut rng, 37, 29)).collect();
    let (mean, std) = dataset_stats(&images).unwrap();
    let (m2, s2) = stats_two_pass(&images);
    assert!(((mean - m2) / m2).abs() <= 1e-9);
    assert!(((std - s2) / s2).abs() <= 1e-9);
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: std::path::PathBuf,
    dataset: EvalDataset,
}

fn fixture(groups: &[&str], per_group: usize) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let mut rng = seeded_rng(5);
    let mut dataset = EvalDataset { groups: groups.iter().map(|g| g.to_string()).collect(), items: vec![] };
    for g in groups {
        let gdir = root.join("data").join(g);
        fs::create_dir_all(&gdir).unwrap();
        for i in 0..per_group {
            let id = format!("{i:06}");
            let image = gdir.join(format!("{id}.png"));
            let truth = gdir.join(format!("{id}_mask.png"));
            random_image(&mut rng, 24, 16).save_png(&image).unwrap();
            random_mask(&mut rng, 24, 16, 0.3).save_png(&truth).unwrap();
            dataset.items.push(EvalItem { id, group: g.to_string(), image, truth });
        }
    }
    Fixture { _dir: dir, root, dataset }
}

fn truth_for(dataset: &EvalDataset, tensor: &Path) -> std::path::PathBuf {
    let id = tensor.file_stem().unwrap().to_str().unwrap();
    let group = tensor.parent().unwrap().file_name().unwrap().to_str().unwrap();
    let item = dataset.items.iter().find(|i| i.id == id && i.group == group).unwrap();
    item.truth.clone()
}

fn compositions() -> Vec<Composition> {
    ["RAW,RAW,RAW", "HED,HED,HED", "HED,RAW,RAW", "HED,CLAHE2,CLAHE4"]
        .iter()
        .map(|s| parse_composition(s).unwrap())
        .collect()
}

#[test]
fn perfect_predictor_scores_one() {
    let fx = fixture(&["High", "Medium", "Low"], 3);
    let ds = fx.dataset.clone();
    let oracle = move |tensor: &Path, out: &Path| -> shapeseg_core::Result<()> {
        fs::copy(truth_for(&ds, tensor), out)?;
        Ok(())
    };
    let reports = run_ablation(
        &fx.dataset,
        &compositions(),
        &PreprocessSettings::default(),
        &oracle,
        &fx.root.join("work"),
    )
    .unwrap();
    assert_eq!(reports.len(), 12);
    assert_eq!(reports[0].group, "High");
    assert_eq!(reports[2].group, "Low");
    assert_eq!(reports[3].composition, [ChannelTag::Edge; 3]);
    for r in &reports {
        assert_eq!(r.mean_iou, Some(1.0));
        assert_eq!(r.n_images(), 3);
        assert!(r.failures.is_empty());
    }
    let csv = render_report(&reports, ReportFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(parse_csv_report(&csv).unwrap().iter().all(|row| row.mean_iou == "1.000"));
}

#[test]
fn empty_predictor_scores_zero_and_tensors_are_valid() {
    let fx = fixture(&["All"], 4);
    let empty = |tensor: &Path, out: &Path| -> shapeseg_core::Result<()> {
        let t = read_tensor(tensor)?;
        assert_eq!(t.semantics(), SHAPE_AWARE);
        BinaryMask::filled(t.width(), t.height(), false)?.save_png(out)
    };
    let reports =
        run_ablation(&fx.dataset, &[SHAPE_AWARE], &PreprocessSettings::default(), &empty, &fx.root.join("w"))
            .unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].mean_iou, Some(0.0));
}

#[test]
fn predictor_failures_are_counted_not_averaged() {
    let fx = fixture(&["G"], 4);
    let ds = fx.dataset.clone();
    let flaky = move |tensor: &Path, out: &Path| -> shapeseg_core::Result<()> {
        if tensor.file_stem().unwrap() == "000001" {
            return Err(Error::Predictor("boom".into()));
        }
        fs::copy(truth_for(&ds, tensor), out)?;
        Ok(())
    };
    let r = run_ablation(&fx.dataset, &[SHAPE_AWARE], &PreprocessSettings::default(), &flaky, &fx.root.join("w"))
        .unwrap();
    assert_eq!(r[0].n_images(), 3);
    assert_eq!(r[0].failures.len(), 1);
    assert_eq!(r[0].failures[0].id, "000001");
    assert_eq!(r[0].mean_iou, Some(1.0));
}

#[test]
fn totals_do_not_depend_on_item_order() {
    let fx = fixture(&["A", "B"], 5);
    let half = |_: &Path, out: &Path| -> shapeseg_core::Result<()> {
        BinaryMask::from_fn(24, 16, |x, _| x < 12)?.save_png(out)
    };
    let settings = PreprocessSettings::default();
    let forward = run_ablation(&fx.dataset, &[SHAPE_AWARE], &settings, &half, &fx.root.join("w1")).unwrap();
    let mut reversed = fx.dataset.clone();
    reversed.items.reverse();
    let backward = run_ablation(&reversed, &[SHAPE_AWARE], &settings, &half, &fx.root.join("w2")).unwrap();
    assert_eq!(forward, backward);
}

#[test]
fn command_predictor_protocol() {
    let fx = fixture(&["G"], 2);
    // Writes an all-foreground mask of the tensor's size using the SAT1 header.
    let script = write_script(
        &fx.root,
        "ones.py",
        r#"#!/usr/bin/env python3
import struct, sys, zlib
hdr = open(sys.argv[1], "rb").read(36)
h, w = struct.unpack("<II", hdr[12:20])
raw = b"".join(b"\x00" + b"\xff" * w for _ in range(h))
def chunk(t, d):
    return struct.pack(">I", len(d)) + t + d + struct.pack(">I", zlib.crc32(t + d))
png = b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)) \
    + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b"")
open(sys.argv[2], "wb").write(png)
"#,
    );
    let predictor = CommandPredictor { command: script };
    let reports =
        run_ablation(&fx.dataset, &[SHAPE_AWARE], &PreprocessSettings::default(), &predictor, &fx.root.join("w"))
            .unwrap();
    assert!(reports[0].failures.is_empty(), "{:?}", reports[0].failures);
    for s in &reports[0].per_image {
        let item = fx.dataset.items.iter().find(|i| i.id == s.id).unwrap();
        let truth = shapeseg_core::load_mask(&item.truth).unwrap();
        let expected = truth.foreground_count() as f64 / (24.0 * 16.0);
        assert!((s.iou - expected).abs() < 1e-12);
    }

    let failing = CommandPredictor { command: write_script(&fx.root, "fail.sh", "#!/bin/sh\nexit 1\n") };
    let reports =
        run_ablation(&fx.dataset, &[SHAPE_AWARE], &PreprocessSettings::default(), &failing, &fx.root.join("w2"))
            .unwrap();
    assert_eq!(reports[0].failures.len(), 2);
    assert_eq!(reports[0].mean_iou, None);
}

#[test]
fn empty_dataset_rejected() {
    let none = |_: &Path, _: &Path| -> shapeseg_core::Result<()> { Ok(()) };
    let err = run_ablation(
        &EvalDataset::default(),
        &[SHAPE_AWARE],
        &PreprocessSettings::default(),
        &none,
        Path::new("/tmp"),
    )
    .unwrap_err();
    assert_eq!(err.to_string(), "empty dataset");
}
