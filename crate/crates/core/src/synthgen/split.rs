use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::rng::seeded_rng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub val: Vec<T>,
}

/// Number of training items, `floor(n × fraction)`.
pub fn train_count(n: usize, fraction: f64) -> usize {
    // Nudge up by a relative ulp-scale margin so 0.29 × 100 lands on 29, not 28.
    let exact = n as f64 * fraction;
    ((exact * (1.0 + 1e-12)).floor() as usize).min(n)
}

/// Seeded shuffle, then the first `floor(n × fraction)` items go to training.
pub fn split_dataset<T: Clone>(items: &[T], train_fraction: f64, seed: u64) -> Result<Split<T>> {
    if items.is_empty() {
        return Err(Error::EmptyList);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut shuffled = items.to_vec();
    shuffled.shuffle(&mut seeded_rng(seed));
    let val = shuffled.split_off(train_count(items.len(), train_fraction));
    Ok(Split { train: shuffled, val })
}
