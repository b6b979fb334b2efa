//! TOML pipeline configuration.
//!
//! Every table is optional; missing values fall back to the defaults below and
//! command-line flags override whatever the file sets. Relative paths are
//! resolved against the directory containing the config file.
//!
//! ```toml
//! seed = 7
//! jobs = 4
//!
//! [paths]
//! renders = "renders"          # renders on black, PNG or PGM
//! backgrounds = "backgrounds"  # natural background images
//! manifest = "scenes.jsonl"    # optional: manifests the renders were made from
//! output = "dataset"
//!
//! [preprocess]
//! grid_cols = 8
//! grid_rows = 8
//! clip_low = 2.0
//! clip_high = 4.0
//! edge_command = "./hed.sh"    # optional external edge model
//!
//! [synth]
//! mask_threshold = 10
//! meshes = 14
//! scale_mode = "symmetric"     # or "enlarge_only"
//!
//! [augment]                    # present = augmentation enabled during build
//! horizontal_flip = 0.5
//! brightness = { probability = 0.5, min = -40.0, max = 40.0 }
//!
//! [split]
//! train_fraction = 0.8
//!
//! [evaluate]
//! predictor = "./predict.sh"
//! compositions = ["RAW,RAW,RAW", "EDGE,CLAHE_LOW,CLAHE_HIGH"]
//! datasets = [{ name = "High", path = "test/high" }]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shapeseg_core::preprocess::{ClaheParams, EdgeBackend, PreprocessSettings};
use shapeseg_core::synthgen::{AugmentationSpec, ScaleMode, DEFAULT_MASK_THRESHOLD, MESH_CATALOG};
use shapeseg_core::tensor::{parse_composition, Composition};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub paths: PathsConfig,
    pub preprocess: PreprocessConfig,
    pub synth: SynthConfig,
    pub augment: Option<AugmentationSpec>,
    pub split: SplitConfig,
    pub evaluate: EvaluateConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub renders: Option<PathBuf>,
    pub backgrounds: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub grid_cols: u32,
    pub grid_rows: u32,
    pub clip_low: f64,
    pub clip_high: f64,
    pub edge_command: Option<PathBuf>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { grid_cols: 8, grid_rows: 8, clip_low: 2.0, clip_high: 4.0, edge_command: None }
    }
}

impl PreprocessConfig {
    pub fn settings(&self) -> Result<PreprocessSettings, CliError> {
        let low = ClaheParams::new(self.grid_cols, self.grid_rows, self.clip_low)?;
        let high = ClaheParams::new(self.grid_cols, self.grid_rows, self.clip_high)?;
        let backend = match &self.edge_command {
            Some(command) => EdgeBackend::External { command: command.clone() },
            None => EdgeBackend::BuiltinMultiscale,
        };
        Ok(PreprocessSettings { backend, low, high })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub mask_threshold: u8,
    pub meshes: usize,
    pub scale_mode: ScaleMode,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { mask_threshold: DEFAULT_MASK_THRESHOLD, meshes: MESH_CATALOG, scale_mode: ScaleMode::Symmetric }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train_fraction: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPath {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub predictor: Option<PathBuf>,
    pub compositions: Vec<String>,
    pub datasets: Vec<NamedPath>,
}

impl EvaluateConfig {
    pub fn parsed_compositions(&self) -> Result<Vec<Composition>, CliError> {
        Ok(self
            .compositions
            .iter()
            .map(|c| parse_composition(c))
            .collect::<Result<_, _>>()?)
    }
}

fn rebase(base: &Path, path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    /// Reads `path`, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        rebase(base, &mut cfg.paths.renders);
        rebase(base, &mut cfg.paths.backgrounds);
        rebase(base, &mut cfg.paths.manifest);
        rebase(base, &mut cfg.paths.output);
        rebase(base, &mut cfg.preprocess.edge_command);
        rebase(base, &mut cfg.evaluate.predictor);
        for d in &mut cfg.evaluate.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Numeric checks owned by the core modules.
    pub fn validate(&self) -> Result<(), CliError> {
        let settings = self.preprocess.settings()?;
        if !(settings.low.clip_factor < settings.high.clip_factor) {
            return Err(CliError::Usage(format!(
                "clip_low ({}) must be below clip_high ({})",
                settings.low.clip_factor, settings.high.clip_factor
            )));
        }
        if let Some(spec) = &self.augment {
            spec.validate()?;
        }
        let f = self.split.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(CliError::Usage(format!("train_fraction {f} must lie strictly between 0 and 1")));
        }
        if self.synth.meshes == 0 {
            return Err(CliError::Usage("synth.meshes must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        self.evaluate.parsed_compositions()?;
        Ok(())
    }
}

/// Fails with a usage error when a required input path is absent.
pub fn require_existing(what: &str, path: Option<&PathBuf>) -> Result<PathBuf, CliError> {
    let path = path.ok_or_else(|| CliError::Usage(format!("no {what} given")))?;
    if !path.exists() {
        return Err(CliError::Usage(format!("{what} {} does not exist", path.display())));
    }
    Ok(path.clone())
}
