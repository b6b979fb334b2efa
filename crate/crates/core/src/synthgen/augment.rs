//! Seeded training-time augmentation.
//!
//! Ops run in a fixed order: horizontal flip, vertical flip, brightness,
//! contrast, gamma, Gaussian blur, motion blur, sharpen. Flips move the image
//! and the mask together; every other op touches the image only. Photometric
//! ops work on real values clamped to `[0, 255]` after each step and are
//! rounded half-up once at the end.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{seeded_rng, SeededRng};
use crate::error::{Error, Result};
use crate::filter::{gaussian_blur, motion_blur, Plane};
use crate::image::{ensure_same_dims, BinaryMask, GrayImage};

/// Applied with `probability`; the parameter is drawn from `U[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeOp {
    pub probability: f64,
    pub min: f64,
    pub max: f64,
}

impl RangeOp {
    pub fn always(value: f64) -> Self {
        Self { probability: 1.0, min: value, max: value }
    }

    fn validate(&self, name: &str, lower_bound: f64, inclusive: bool) -> Result<()> {
        check_probability(name, self.probability)?;
        let above = |v: f64| if inclusive { v >= lower_bound } else { v > lower_bound };
        if !(self.min <= self.max) || !above(self.min) || !self.max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name}: range [{}, {}] invalid (lower bound {lower_bound})",
                self.min, self.max
            )));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut SeededRng) -> Option<f64> {
        if !rng.random_bool(self.probability) {
            return None;
        }
        Some(if self.min == self.max { self.min } else { rng.random_range(self.min..=self.max) })
    }
}

/// Linear motion blur with a random length in `[min_length, max_length]`
/// pixels and a direction uniform in `[0°, 180°)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionBlurOp {
    pub probability: f64,
    pub min_length: u32,
    pub max_length: u32,
}

impl Default for MotionBlurOp {
    fn default() -> Self {
        Self { probability: 0.2, min_length: 5, max_length: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentationSpec {
    pub seed: u64,
    pub horizontal_flip: f64,
    pub vertical_flip: f64,
    /// Additive intensity delta.
    pub brightness: Option<RangeOp>,
    /// Scale factor about the image mean.
    pub contrast: Option<RangeOp>,
    /// Exponent on normalized intensity.
    pub gamma: Option<RangeOp>,
    /// Gaussian sigma in pixels.
    pub blur: Option<RangeOp>,
    pub motion_blur: Option<MotionBlurOp>,
    /// Unsharp-mask amount (σ = 1 blur).
    pub sharpen: Option<RangeOp>,
}

impl AugmentationSpec {
    /// Every op enabled with moderate ranges.
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            horizontal_flip: 0.5,
            vertical_flip: 0.5,
            brightness: Some(RangeOp { probability: 0.5, min: -40.0, max: 40.0 }),
            contrast: Some(RangeOp { probability: 0.5, min: 0.7, max: 1.3 }),
            gamma: Some(RangeOp { probability: 0.5, min: 0.7, max: 1.5 }),
            blur: Some(RangeOp { probability: 0.2, min: 0.5, max: 1.5 }),
            motion_blur: Some(MotionBlurOp::default()),
            sharpen: Some(RangeOp { probability: 0.2, min: 0.5, max: 1.5 }),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("horizontal_flip", self.horizontal_flip)?;
        check_probability("vertical_flip", self.vertical_flip)?;
        if let Some(op) = &self.brightness {
            op.validate("brightness", f64::NEG_INFINITY, false)?;
        }
        if let Some(op) = &self.contrast {
            op.validate("contrast", 0.0, true)?;
        }
        if let Some(op) = &self.gamma {
            op.validate("gamma", 0.0, false)?;
        }
        if let Some(op) = &self.blur {
            op.validate("blur", 0.0, true)?;
        }
        if let Some(op) = &self.motion_blur {
            check_probability("motion_blur", op.probability)?;
            if op.min_length == 0 || op.min_length > op.max_length {
                return Err(Error::InvalidParameter(format!(
                    "motion_blur: length range [{}, {}] invalid",
                    op.min_length, op.max_length
                )));
            }
        }
        if let Some(op) = &self.sharpen {
            op.validate("sharpen", 0.0, true)?;
        }
        Ok(())
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name}: probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn flip_rows<T: Copy>(data: &[T], width: usize) -> Vec<T> {
    data.chunks_exact(width)
        .flat_map(|row| row.iter().rev().copied())
        .collect()
}

fn flip_cols<T: Copy>(data: &[T], width: usize) -> Vec<T> {
    data.chunks_exact(width).rev().flatten().copied().collect()
}

pub fn flip_horizontal(image: &GrayImage) -> GrayImage {
    let (w, h) = image.dimensions();
    GrayImage::new(w, h, flip_rows(image.data(), w as usize)).unwrap()
}

pub fn flip_vertical(image: &GrayImage) -> GrayImage {
    let (w, h) = image.dimensions();
    GrayImage::new(w, h, flip_cols(image.data(), w as usize)).unwrap()
}

pub fn flip_mask_horizontal(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dimensions();
    BinaryMask::new(w, h, flip_rows(mask.data(), w as usize)).unwrap()
}

pub fn flip_mask_vertical(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dimensions();
    BinaryMask::new(w, h, flip_cols(mask.data(), w as usize)).unwrap()
}

fn map_clamped(plane: &mut Plane, f: impl Fn(f64) -> f64) {
    for v in plane.data.iter_mut() {
        *v = f(*v).clamp(0.0, 255.0);
    }
}

fn clamp_plane(mut plane: Plane) -> Plane {
    map_clamped(&mut plane, |v| v);
    plane
}

pub fn augment(image: &GrayImage, mask: &BinaryMask, spec: &AugmentationSpec) -> Result<(GrayImage, BinaryMask)> {
    ensure_same_dims(image.dimensions(), mask.dimensions())?;
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);

    let mut image = image.clone();
    let mut mask = mask.clone();
    if rng.random_bool(spec.horizontal_flip) {
        image = flip_horizontal(&image);
        mask = flip_mask_horizontal(&mask);
    }
    if rng.random_bool(spec.vertical_flip) {
        image = flip_vertical(&image);
        mask = flip_mask_vertical(&mask);
    }

    let mut plane = Plane::from_gray(&image);
    let mut touched = false;
    if let Some(delta) = spec.brightness.and_then(|op| op.draw(&mut rng)) {
        map_clamped(&mut plane, |v| v + delta);
        touched = true;
    }
    if let Some(factor) = spec.contrast.and_then(|op| op.draw(&mut rng)) {
        let mean = plane.data.iter().sum::<f64>() / plane.data.len() as f64;
        map_clamped(&mut plane, |v| (v - mean) * factor + mean);
        touched = true;
    }
    if let Some(gamma) = spec.gamma.and_then(|op| op.draw(&mut rng)) {
        map_clamped(&mut plane, |v| 255.0 * (v / 255.0).powf(gamma));
        touched = true;
    }
    if let Some(sigma) = spec.blur.and_then(|op| op.draw(&mut rng)) {
        plane = clamp_plane(gaussian_blur(&plane, sigma));
        touched = true;
    }
    if let Some(op) = spec.motion_blur {
        if rng.random_bool(op.probability) {
            let length = rng.random_range(op.min_length..=op.max_length) as usize;
            let angle = rng.random_range(0.0..180.0);
            plane = clamp_plane(motion_blur(&plane, length, angle));
            touched = true;
        }
    }
    if let Some(amount) = spec.sharpen.and_then(|op| op.draw(&mut rng)) {
        let blurred = gaussian_blur(&plane, 1.0);
        for (v, b) in plane.data.iter_mut().zip(&blurred.data) {
            *v = (*v + amount * (*v - b)).clamp(0.0, 255.0);
        }
        touched = true;
    }

    if touched {
        image = plane.to_gray();
    }
    Ok((image, mask))
}
