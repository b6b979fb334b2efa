//! Slow, direct reference implementations used as test oracles, plus fixture
//! helpers. Nothing here calls the production algorithms it is checked against.

use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use rand::Rng;
use shapeseg_core::{BinaryMask, GrayImage};

type Q = Ratio<i64>;

fn round_half_up(v: Q) -> i64 {
    (v + Q::new(1, 2)).floor().to_integer()
}

/// CLAHE written straight from its definition with exact rational arithmetic.
pub fn clahe_reference(image: &GrayImage, cols: usize, rows: usize, clip_factor: f64) -> Vec<u8> {
    let w = image.width() as usize;
    let h = image.height() as usize;
    let tile_x0 = |t: usize| t * (w / cols);
    let tile_x1 = |t: usize| if t == cols - 1 { w } else { (t + 1) * (w / cols) };
    let tile_y0 = |t: usize| t * (h / rows);
    let tile_y1 = |t: usize| if t == rows - 1 { h } else { (t + 1) * (h / rows) };

    // mapping[ty][tx][v]
    let mut mapping = vec![vec![[0i64; 256]; cols]; rows];
    for ty in 0..rows {
        for tx in 0..cols {
            let mut hist = [0i64; 256];
            for y in tile_y0(ty)..tile_y1(ty) {
                for x in tile_x0(tx)..tile_x1(tx) {
                    hist[image.get(x as u32, y as u32) as usize] += 1;
                }
            }
            let n: i64 = hist.iter().sum();
            let limit = ((clip_factor * n as f64 / 256.0).floor() as i64).max(1);
            let mut excess = 0;
            for bin in hist.iter_mut() {
                if *bin > limit {
                    excess += *bin - limit;
                    *bin = limit;
                }
            }
            for k in 0..excess {
                hist[(k % 256) as usize] += 1;
            }
            let mut cum = 0;
            for v in 0..256 {
                cum += hist[v];
                mapping[ty][tx][v] = round_half_up(Q::new(255 * cum, n));
            }
        }
    }

    let centres_x: Vec<Q> = (0..cols)
        .map(|t| Q::new((tile_x0(t) + tile_x1(t) - 1) as i64, 2))
        .collect();
    let centres_y: Vec<Q> = (0..rows)
        .map(|t| Q::new((tile_y0(t) + tile_y1(t) - 1) as i64, 2))
        .collect();
    let neighbours = |centres: &[Q], p: usize| -> (usize, usize, Q) {
        let p = Q::from_integer(p as i64);
        let last = centres.len() - 1;
        if p <= centres[0] {
            return (0, 0, Q::from_integer(0));
        }
        if p >= centres[last] {
            return (last, last, Q::from_integer(0));
        }
        let mut i = 0;
        while !(centres[i] <= p && p < centres[i + 1]) {
            i += 1;
        }
        (i, i + 1, (p - centres[i]) / (centres[i + 1] - centres[i]))
    };

    let one = Q::from_integer(1);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (a, b, wy) = neighbours(&centres_y, y);
        for x in 0..w {
            let (c, d, wx) = neighbours(&centres_x, x);
            let v = image.get(x as u32, y as u32) as usize;
            let m = |ty: usize, tx: usize| Q::from_integer(mapping[ty][tx][v]);
            let top = (one - wx) * m(a, c) + wx * m(a, d);
            let bottom = (one - wx) * m(b, c) + wx * m(b, d);
            out.push(round_half_up((one - wy) * top + wy * bottom) as u8);
        }
    }
    out
}

/// Classical global histogram equalization, `round(255 × #{p ≤ v} / N)`,
/// computed by counting pixels directly from a sorted copy.
pub fn global_equalization(image: &GrayImage) -> Vec<u8> {
    let mut sorted = image.data().to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as i64;
    image
        .data()
        .iter()
        .map(|&v| {
            let at_most = sorted.partition_point(|&s| s <= v) as i64;
            round_half_up(Q::new(255 * at_most, n)) as u8
        })
        .collect()
}

/// (tp, fp, fn, tn) by a double loop over coordinates.
pub fn confusion_brute(pred: &BinaryMask, truth: &BinaryMask) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for y in 0..truth.height() {
        for x in 0..truth.width() {
            let p = pred.get(x, y);
            let t = truth.get(x, y);
            if p && t {
                tp += 1;
            } else if p {
                fp += 1;
            } else if t {
                fn_ += 1;
            } else {
                tn += 1;
            }
        }
    }
    (tp, fp, fn_, tn)
}

/// Two-pass mean and population standard deviation.
pub fn stats_two_pass(images: &[GrayImage]) -> (f64, f64) {
    let values: Vec<f64> = images
        .iter()
        .flat_map(|i| i.data().iter().map(|&v| v as f64))
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Random image drawn from one of several intensity distributions so that
/// flat, narrow and structured histograms all show up.
pub fn random_image<R: Rng>(rng: &mut R, width: u32, height: u32) -> GrayImage {
    match rng.random_range(0..4) {
        0 => GrayImage::from_fn(width, height, |_, _| rng.random()).unwrap(),
        1 => {
            let centre: i32 = rng.random_range(0..256);
            let spread: i32 = rng.random_range(1..40);
            GrayImage::from_fn(width, height, |_, _| {
                (centre + rng.random_range(-spread..=spread)).clamp(0, 255) as u8
            })
            .unwrap()
        }
        2 => {
            let (fx, fy) = (rng.random_range(0..6u32), rng.random_range(0..6u32));
            GrayImage::from_fn(width, height, |x, y| {
                let base = (x * fx + y * fy) % 200;
                (base + rng.random_range(0..56u32)) as u8
            })
            .unwrap()
        }
        _ => {
            let levels: Vec<u8> = (0..3).map(|_| rng.random()).collect();
            GrayImage::from_fn(width, height, |_, _| levels[rng.random_range(0..3)]).unwrap()
        }
    }
}

pub fn random_mask<R: Rng>(rng: &mut R, width: u32, height: u32, density: f64) -> BinaryMask {
    BinaryMask::from_fn(width, height, |_, _| rng.random_bool(density)).unwrap()
}

/// Writes an executable script (mode 0755) and returns its path.
pub fn write_script(dir: &Path, name: &str, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path
}

/// Every regular file under `root` as (relative path, bytes), sorted by path.
pub fn snapshot_dir(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push((path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_equalization_by_hand() {
        // values {0, 0, 100, 200}: CDF = 2/4, 3/4, 4/4
        let img = GrayImage::new(4, 1, vec![0, 100, 0, 200]).unwrap();
        assert_eq!(global_equalization(&img), vec![128, 191, 128, 255]);
    }

    #[test]
    fn reference_on_uniform_single_tile() {
        // 4 pixels of 7, limit max(1, floor(1000*4/256)) = 15, no clipping.
        let img = GrayImage::filled(2, 2, 7).unwrap();
        assert_eq!(clahe_reference(&img, 1, 1, 1000.0), vec![255; 4]);
    }
}

/// Writes `count` renders-on-black (a textured ellipse, all foreground
/// pixels above 20) to `dir/NNN.png`.
pub fn write_renders(dir: &Path, count: usize, width: u32, height: u32, seed: u64) {
    fs::create_dir_all(dir).unwrap();
    let mut rng = shapeseg_core::synthgen::seeded_rng(seed);
    for i in 0..count {
        let cx = rng.random_range(0.3..0.7) * width as f64;
        let cy = rng.random_range(0.3..0.7) * height as f64;
        let rx = rng.random_range(0.15..0.3) * width as f64;
        let ry = rng.random_range(0.15..0.3) * height as f64;
        let img = GrayImage::from_fn(width, height, |x, y| {
            let dx = (x as f64 - cx) / rx;
            let dy = (y as f64 - cy) / ry;
            if dx * dx + dy * dy <= 1.0 {
                rng.random_range(21..=255)
            } else {
                0
            }
        })
        .unwrap();
        img.save_png(dir.join(format!("{i:03}.png"))).unwrap();
    }
}

/// Writes `count` random backgrounds of assorted sizes to `dir/bgNN.png`.
pub fn write_backgrounds(dir: &Path, count: usize, seed: u64) {
    fs::create_dir_all(dir).unwrap();
    let mut rng = shapeseg_core::synthgen::seeded_rng(seed);
    for i in 0..count {
        let (w, h) = (rng.random_range(20..90), rng.random_range(20..90));
        random_image(&mut rng, w, h).save_png(dir.join(format!("bg{i:02}.png"))).unwrap();
    }
}

/// Test set in the evaluate layout: `dir/images/ID.png`, `dir/masks/ID.png`.
pub fn write_test_set(dir: &Path, count: usize, width: u32, height: u32, seed: u64) {
    let mut rng = shapeseg_core::synthgen::seeded_rng(seed);
    fs::create_dir_all(dir.join("images")).unwrap();
    fs::create_dir_all(dir.join("masks")).unwrap();
    for i in 0..count {
        let id = format!("{i:06}");
        random_image(&mut rng, width, height).save_png(dir.join("images").join(format!("{id}.png"))).unwrap();
        random_mask(&mut rng, width, height, 0.35).save_png(dir.join("masks").join(format!("{id}.png"))).unwrap();
    }
}

/// Predictor that copies `$TRUTH_ROOT/<group>/masks/<id>.png`, where the
/// group is the tensor's parent directory name and the id its file stem.
pub const TRUTH_PREDICTOR: &str = r#"#!/bin/sh
group=$(basename "$(dirname "$1")")
id=$(basename "$1" .sat)
exec cp "$TRUTH_ROOT/$group/masks/$id.png" "$2"
"#;
