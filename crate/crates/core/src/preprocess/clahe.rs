//! Contrast-limited adaptive histogram equalization.
//!
//! The image is cut into `grid_rows × grid_cols` tiles; the last row and
//! column absorb any remainder pixels. Each tile gets a 256-bin histogram
//! which is clipped at
//! `max(1, floor(clip_factor × tile_pixels / 256))`, with the clipped excess
//! handed back in one pass: every bin receives `excess / 256` and the first
//! `excess % 256` bins receive one more. The tile mapping is
//! `round(255 × CDF(v))`.
//!
//! Output pixels bilinearly interpolate the mappings of the four surrounding
//! tile centres, clamping to the nearest centre at the borders. All of this is
//! done in exact integer arithmetic with half-up rounding, so results do not
//! depend on floating-point evaluation order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const BINS: usize = 256;

pub type Histogram = [u32; BINS];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub grid_cols: u32,
    pub grid_rows: u32,
    pub clip_factor: f64,
}

impl ClaheParams {
    pub fn new(grid_cols: u32, grid_rows: u32, clip_factor: f64) -> Result<Self> {
        let params = Self { grid_cols, grid_rows, clip_factor };
        params.validate()?;
        Ok(params)
    }

    /// 8×8 grid with the given clip factor.
    pub fn with_clip(clip_factor: f64) -> Self {
        Self { grid_cols: 8, grid_rows: 8, clip_factor }
    }

    /// The lower of the two equalization thresholds (clip factor 2).
    pub fn low() -> Self {
        Self::with_clip(2.0)
    }

    /// The higher of the two equalization thresholds (clip factor 4).
    pub fn high() -> Self {
        Self::with_clip(4.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_cols == 0 || self.grid_rows == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 1x1, got {}x{}",
                self.grid_cols, self.grid_rows
            )));
        }
        if !(self.clip_factor > 0.0) || !self.clip_factor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "clip_factor must be positive and finite, got {}",
                self.clip_factor
            )));
        }
        Ok(())
    }
}

/// Per-bin ceiling for a tile of `pixel_count` pixels.
pub fn clip_limit(clip_factor: f64, pixel_count: usize) -> u32 {
    let raw = (clip_factor * pixel_count as f64 / BINS as f64).floor();
    (raw.min(u32::MAX as f64) as u32).max(1)
}

/// Clips every bin at `limit` and redistributes the excess in a single pass.
pub fn clip_histogram(hist: &mut Histogram, limit: u32) {
    let mut excess: u64 = 0;
    for bin in hist.iter_mut() {
        if *bin > limit {
            excess += (*bin - limit) as u64;
            *bin = limit;
        }
    }
    let share = (excess / BINS as u64) as u32;
    let remainder = (excess % BINS as u64) as usize;
    for (i, bin) in hist.iter_mut().enumerate() {
        *bin += share + u32::from(i < remainder);
    }
}

/// `m(v) = round(255 × CDF(v))`, rounded half-up.
pub fn equalization_map(hist: &Histogram) -> [u8; BINS] {
    let total: u64 = hist.iter().map(|&c| c as u64).sum();
    let mut map = [0u8; BINS];
    if total == 0 {
        return map;
    }
    let mut cum = 0u64;
    for (slot, &count) in map.iter_mut().zip(hist) {
        cum += count as u64;
        *slot = ((2 * 255 * cum + total) / (2 * total)) as u8;
    }
    map
}

/// Tile boundaries and interpolation weights along one image axis.
struct Axis {
    starts: Vec<usize>,
    lens: Vec<usize>,
    /// Per pixel: (lower tile, upper tile, weight numerator, weight denominator).
    weights: Vec<(usize, usize, u64, u64)>,
}

impl Axis {
    fn new(size: usize, tiles: usize) -> Self {
        let base = size / tiles;
        let starts: Vec<usize> = (0..tiles).map(|i| i * base).collect();
        let lens: Vec<usize> = (0..tiles)
            .map(|i| if i + 1 == tiles { size - i * base } else { base })
            .collect();
        // Doubled centre coordinates keep half-pixel centres integral.
        let centres: Vec<u64> = starts
            .iter()
            .zip(&lens)
            .map(|(&s, &l)| (2 * s + l - 1) as u64)
            .collect();
        let last = tiles - 1;
        let weights = (0..size)
            .map(|p| {
                let p2 = 2 * p as u64;
                if p2 <= centres[0] {
                    (0, 0, 0, 1)
                } else if p2 >= centres[last] {
                    (last, last, 0, 1)
                } else {
                    let i = centres.partition_point(|&c| c <= p2) - 1;
                    (i, i + 1, p2 - centres[i], centres[i + 1] - centres[i])
                }
            })
            .collect();
        Self { starts, lens, weights }
    }
}

pub fn clahe(image: &GrayImage, params: &ClaheParams) -> Result<GrayImage> {
    params.validate()?;
    let (width, height) = (image.width() as usize, image.height() as usize);
    let (cols, rows) = (params.grid_cols as usize, params.grid_rows as usize);
    if width < cols || height < rows {
        return Err(Error::Precondition(format!(
            "image {width}x{height} is smaller than the {cols}x{rows} tile grid"
        )));
    }

    let xs = Axis::new(width, cols);
    let ys = Axis::new(height, rows);
    let data = image.data();

    let mut maps = Vec::with_capacity(rows * cols);
    for ty in 0..rows {
        for tx in 0..cols {
            let mut hist = [0u32; BINS];
            for y in ys.starts[ty]..ys.starts[ty] + ys.lens[ty] {
                let row = &data[y * width + xs.starts[tx]..y * width + xs.starts[tx] + xs.lens[tx]];
                for &v in row {
                    hist[v as usize] += 1;
                }
            }
            clip_histogram(&mut hist, clip_limit(params.clip_factor, xs.lens[tx] * ys.lens[ty]));
            maps.push(equalization_map(&hist));
        }
    }

    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let (ty0, ty1, ny, dy) = ys.weights[y];
        for x in 0..width {
            let (tx0, tx1, nx, dx) = xs.weights[x];
            let v = data[y * width + x] as usize;
            let m = |ty: usize, tx: usize| maps[ty * cols + tx][v] as u64;
            let num = (dx - nx) * (dy - ny) * m(ty0, tx0)
                + nx * (dy - ny) * m(ty0, tx1)
                + (dx - nx) * ny * m(ty1, tx0)
                + nx * ny * m(ty1, tx1);
            let den = dx * dy;
            out.push(((2 * num + den) / (2 * den)) as u8);
        }
    }
    GrayImage::new(image.width(), image.height(), out)
}
