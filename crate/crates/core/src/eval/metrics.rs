use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, BinaryMask, GrayImage};

/// Pixel counts of a prediction against ground truth; foreground is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn iou(&self) -> f64 {
        iou(self)
    }
}

pub fn confusion(pred: &BinaryMask, truth: &BinaryMask) -> Result<ConfusionCounts> {
    ensure_same_dims(truth.dimensions(), pred.dimensions())?;
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.data().iter().zip(truth.data()) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `tp / (tp + fp + fn)`; two empty masks score 1.0.
pub fn iou(counts: &ConfusionCounts) -> f64 {
    let denom = counts.tp + counts.fp + counts.fn_;
    if denom == 0 {
        return 1.0;
    }
    counts.tp as f64 / denom as f64
}

/// Pooled pixel mean and population standard deviation.
pub fn dataset_stats(images: &[GrayImage]) -> Result<(f64, f64)> {
    if images.is_empty() {
        return Err(Error::EmptyList);
    }
    // Integer moments are exact; only the final division rounds.
    let (mut n, mut sum, mut sum_sq) = (0u128, 0u128, 0u128);
    for img in images {
        n += img.data().len() as u128;
        for &v in img.data() {
            sum += v as u128;
            sum_sq += (v as u128) * (v as u128);
        }
    }
    let mean = sum as f64 / n as f64;
    let var_scaled = n * sum_sq - sum * sum;
    let std = (var_scaled as f64).sqrt() / n as f64;
    Ok((mean, std))
}
