use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "shapeseg", version, about = "Synthetic data, pre-processing and evaluation for body-part segmentation")]
pub struct Cli {
    /// TOML pipeline config; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Base seed for every random draw
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker threads (defaults to the config value, then to all cores)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Debug-level logging on stderr
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample scene manifests for the renderer as JSONL
    Manifest(ManifestArgs),
    /// Build a dataset from renders on black and background images
    Build(BuildArgs),
    /// Turn one image into a SAT1 tensor
    Preprocess(PreprocessArgs),
    /// Apply seeded augmentation to one image/mask pair
    Augment(AugmentArgs),
    /// Write a seeded train/validation split
    Split(SplitArgs),
    /// Score tensor compositions with an external predictor
    Evaluate(EvaluateArgs),
    /// Render saved evaluation results as CSV or Markdown
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleModeArg {
    Symmetric,
    EnlargeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct ManifestArgs {
    /// Number of manifests
    #[arg(long, short = 'n')]
    pub count: usize,
    /// Mesh catalog size
    #[arg(long)]
    pub meshes: Option<usize>,
    /// Background catalog size
    #[arg(long, default_value_t = shapeseg_core::synthgen::BACKGROUND_CATALOG)]
    pub backgrounds: usize,
    #[arg(long, value_enum)]
    pub scale_mode: Option<ScaleModeArg>,
    #[arg(long, short, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Default, Args)]
pub struct PreprocessFlags {
    #[arg(long)]
    pub grid_cols: Option<u32>,
    #[arg(long)]
    pub grid_rows: Option<u32>,
    #[arg(long)]
    pub clip_low: Option<f64>,
    #[arg(long)]
    pub clip_high: Option<f64>,
    /// External edge model: called with a PGM path, prints f32 LE values on stdout
    #[arg(long, value_name = "CMD")]
    pub edge_command: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Directory of renders on a black background (PNG/PGM)
    #[arg(long, value_name = "DIR")]
    pub renders: Option<PathBuf>,
    /// Directory of background images
    #[arg(long, value_name = "DIR")]
    pub backgrounds: Option<PathBuf>,
    /// JSONL manifests the renders were produced from, one per render
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long, short, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<u8>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Augment with the config's [augment] table, or the standard suite if absent
    #[arg(long)]
    pub augment: bool,
    #[command(flatten)]
    pub preprocess: PreprocessFlags,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Channel tags, e.g. "RAW,RAW,RAW" (default EDGE,CLAHE_LOW,CLAHE_HIGH)
    #[arg(long)]
    pub composition: Option<String>,
    #[command(flatten)]
    pub preprocess: PreprocessFlags,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out_image: PathBuf,
    #[arg(long)]
    pub out_mask: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Text file with one item id per line
    #[arg(long, value_name = "FILE", conflicts_with = "dataset", required_unless_present = "dataset")]
    pub ids: Option<PathBuf>,
    /// Dataset directory; ids are the stems of images/*
    #[arg(long, value_name = "DIR")]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long, short, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Test set as DIR or NAME=DIR, with images/ and masks/ inside; repeatable
    #[arg(long = "dataset", value_name = "[NAME=]DIR")]
    pub datasets: Vec<String>,
    /// Command run as `CMD <tensor.sat> <mask.png>`
    #[arg(long, value_name = "CMD")]
    pub predictor: Option<PathBuf>,
    /// Channel tags, repeatable (default: the four ablation variants)
    #[arg(long = "composition")]
    pub compositions: Vec<String>,
    #[arg(long, short, value_name = "FILE")]
    pub out: PathBuf,
    /// Defaults to markdown for *.md outputs, CSV otherwise
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also write the full per-image results as JSON
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Keep generated tensors and predictions here instead of a temp dir
    #[arg(long, value_name = "DIR")]
    pub work_dir: Option<PathBuf>,
    #[command(flatten)]
    pub preprocess: PreprocessFlags,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON results written by `evaluate --json`
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Defaults to stdout
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
