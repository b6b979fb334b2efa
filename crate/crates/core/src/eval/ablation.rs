//! Scoring tensor-composition variants with an external mask predictor.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{confusion, iou};
use crate::error::{Error, Result};
use crate::image::{load_gray_image, load_mask};
use crate::preprocess::PreprocessSettings;
use crate::tensor::{composition_label, save_tensor, Composition};

/// Produces a mask PNG for a SAT1 tensor.
pub trait Predictor: Sync {
    fn predict(&self, tensor_path: &Path, mask_out: &Path) -> Result<()>;
}

impl<F> Predictor for F
where
    F: Fn(&Path, &Path) -> Result<()> + Sync,
{
    fn predict(&self, tensor_path: &Path, mask_out: &Path) -> Result<()> {
        self(tensor_path, mask_out)
    }
}

/// Runs `command <tensor.sat> <mask.png>`; exit status 0 means success.
#[derive(Debug, Clone)]
pub struct CommandPredictor {
    pub command: PathBuf,
}

impl Predictor for CommandPredictor {
    fn predict(&self, tensor_path: &Path, mask_out: &Path) -> Result<()> {
        let status = Command::new(&self.command)
            .arg(tensor_path)
            .arg(mask_out)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .status()
            .map_err(|e| Error::Predictor(format!("cannot run {}: {e}", self.command.display())))?;
        if !status.success() {
            return Err(Error::Predictor(format!("{} exited with {status}", self.command.display())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalItem {
    pub id: String,
    pub group: String,
    pub image: PathBuf,
    pub truth: PathBuf,
}

/// Image/mask pairs grouped into named test sets. `groups` fixes report order.
#[derive(Debug, Clone, Default)]
pub struct EvalDataset {
    pub groups: Vec<String>,
    pub items: Vec<EvalItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub id: String,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub composition: Composition,
    pub group: String,
    /// Sorted by item id.
    pub per_image: Vec<ImageScore>,
    /// `None` when every item failed.
    pub mean_iou: Option<f64>,
    pub failures: Vec<ItemFailure>,
}

impl EvalReport {
    pub fn composition_label(&self) -> String {
        composition_label(&self.composition)
    }

    pub fn n_images(&self) -> usize {
        self.per_image.len()
    }
}

fn score_item(
    item: &EvalItem,
    compositions: &[Composition],
    settings: &PreprocessSettings,
    predictor: &dyn Predictor,
    work_dir: &Path,
) -> Vec<std::result::Result<f64, String>> {
    let loaded = load_gray_image(&item.image).and_then(|img| Ok((img, load_mask(&item.truth)?)));
    let (image, truth) = match loaded {
        Ok(pair) => pair,
        Err(e) => return vec![Err(e.to_string()); compositions.len()],
    };
    compositions
        .iter()
        .enumerate()
        .map(|(k, &composition)| {
            let run = || -> Result<f64> {
                let dir = work_dir.join(format!("c{k}")).join(&item.group);
                fs::create_dir_all(&dir)?;
                let tensor_path = dir.join(format!("{}.sat", item.id));
                let mask_path = dir.join(format!("{}.png", item.id));
                save_tensor(&settings.assemble_variant(&image, composition)?, &tensor_path)?;
                predictor.predict(&tensor_path, &mask_path)?;
                let pred = load_mask(&mask_path)
                    .map_err(|e| Error::Predictor(format!("unreadable prediction: {e}")))?;
                Ok(iou(&confusion(&pred, &truth)?))
            };
            run().map_err(|e| e.to_string())
        })
        .collect()
}

/// Scores every composition on every item, one report per (composition, group).
///
/// Items are processed on the current rayon pool. Tensors and predicted masks
/// are written under `work_dir`.
pub fn run_ablation(
    dataset: &EvalDataset,
    compositions: &[Composition],
    settings: &PreprocessSettings,
    predictor: &dyn Predictor,
    work_dir: &Path,
) -> Result<Vec<EvalReport>> {
    if dataset.items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if compositions.is_empty() {
        return Err(Error::InvalidParameter("no compositions to evaluate".into()));
    }
    if let Some(item) = dataset.items.iter().find(|i| !dataset.groups.contains(&i.group)) {
        return Err(Error::InvalidParameter(format!(
            "item {} belongs to undeclared group {}",
            item.id, item.group
        )));
    }

    let results: Vec<_> = dataset
        .items
        .par_iter()
        .map(|item| score_item(item, compositions, settings, predictor, work_dir))
        .collect();

    let mut reports = Vec::with_capacity(compositions.len() * dataset.groups.len());
    for (k, &composition) in compositions.iter().enumerate() {
        for group in &dataset.groups {
            let mut per_image = Vec::new();
            let mut failures = Vec::new();
            for (item, outcome) in dataset.items.iter().zip(&results) {
                if &item.group != group {
                    continue;
                }
                match &outcome[k] {
                    Ok(score) => per_image.push(ImageScore { id: item.id.clone(), iou: *score }),
                    Err(reason) => {
                        log::warn!("{} [{}]: {reason}", item.id, composition_label(&composition));
                        failures.push(ItemFailure { id: item.id.clone(), reason: reason.clone() });
                    }
                }
            }
            per_image.sort_by(|a, b| a.id.cmp(&b.id));
            failures.sort_by(|a, b| a.id.cmp(&b.id));
            let mean_iou = (!per_image.is_empty())
                .then(|| per_image.iter().map(|s| s.iou).sum::<f64>() / per_image.len() as f64);
            reports.push(EvalReport { composition, group: group.clone(), per_image, mean_iou, failures });
        }
    }
    Ok(reports)
}
