use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{debug, error, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shapeseg_core::eval::{self, CommandPredictor, EvalDataset, EvalItem, EvalReport, ReportFormat};
use shapeseg_core::synthgen::{
    self, augment, composite, derive_seed, extract_mask, sample_manifest_with, split_dataset, AugmentationSpec,
    CatalogSizes, ScaleMode, SceneManifest,
};
use shapeseg_core::tensor::{parse_composition, save_tensor, Composition, SHAPE_AWARE};
use shapeseg_core::{load_gray_image, load_mask, Error as CoreError};

use crate::cli::*;
use crate::config::{require_existing, NamedPath, PipelineConfig};
use crate::error::CliError;

/// Resolved config plus global flags.
pub struct Context {
    pub config: PipelineConfig,
    pub seed: u64,
}

fn apply_preprocess_flags(cfg: &mut PipelineConfig, flags: &PreprocessFlags) -> Result<(), CliError> {
    let p = &mut cfg.preprocess;
    if let Some(v) = flags.grid_cols {
        p.grid_cols = v;
    }
    if let Some(v) = flags.grid_rows {
        p.grid_rows = v;
    }
    if let Some(v) = flags.clip_low {
        p.clip_low = v;
    }
    if let Some(v) = flags.clip_high {
        p.clip_high = v;
    }
    if let Some(v) = &flags.edge_command {
        p.edge_command = Some(v.clone());
    }
    cfg.validate()
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

/// PNG and PGM files directly under `dir`, sorted by name.
fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("png" | "pgm")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn item_id(index: usize) -> String {
    format!("{index:06}")
}

pub fn manifest(ctx: &Context, args: &ManifestArgs) -> Result<(), CliError> {
    let catalog = CatalogSizes {
        meshes: args.meshes.unwrap_or(ctx.config.synth.meshes),
        backgrounds: args.backgrounds,
    };
    let mode = match args.scale_mode {
        Some(ScaleModeArg::Symmetric) => ScaleMode::Symmetric,
        Some(ScaleModeArg::EnlargeOnly) => ScaleMode::EnlargeOnly,
        None => ctx.config.synth.scale_mode,
    };
    let manifests = (0..args.count)
        .into_par_iter()
        .map(|i| sample_manifest_with(derive_seed(ctx.seed, i as u64), catalog, mode))
        .collect::<Result<Vec<_>, _>>()?;
    create_parent(&args.out)?;
    synthgen::write_jsonl(BufWriter::new(File::create(&args.out)?), &manifests)?;
    info!("wrote {} manifests to {}", manifests.len(), args.out.display());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFile {
    pub seed: u64,
    pub train_fraction: f64,
    pub train: Vec<String>,
    pub val: Vec<String>,
}

fn write_split(path: &Path, ids: &[String], fraction: f64, seed: u64) -> Result<SplitFile, CliError> {
    let split = split_dataset(ids, fraction, seed)?;
    let file = SplitFile { seed, train_fraction: fraction, train: split.train, val: split.val };
    create_parent(path)?;
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &file).map_err(CoreError::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(file)
}

pub fn build(ctx: &Context, args: &BuildArgs) -> Result<(), CliError> {
    let mut cfg = ctx.config.clone();
    apply_preprocess_flags(&mut cfg, &args.preprocess)?;
    if let Some(f) = args.train_fraction {
        cfg.split.train_fraction = f;
        cfg.validate()?;
    }
    let renders_dir = require_existing("renders directory", args.renders.as_ref().or(cfg.paths.renders.as_ref()))?;
    let backgrounds_dir =
        require_existing("backgrounds directory", args.backgrounds.as_ref().or(cfg.paths.backgrounds.as_ref()))?;
    let out_dir = args
        .out
        .clone()
        .or(cfg.paths.output.clone())
        .ok_or_else(|| CliError::Usage("no output directory given".into()))?;
    let threshold = args.threshold.unwrap_or(cfg.synth.mask_threshold);
    let settings = cfg.preprocess.settings()?;
    let augmentation = args
        .augment
        .then(|| cfg.augment.clone().unwrap_or_else(|| AugmentationSpec::standard(0)));

    let renders = list_images(&renders_dir)?;
    let backgrounds = list_images(&backgrounds_dir)?;
    if renders.is_empty() {
        return Err(CoreError::EmptyDataset.into());
    }
    if backgrounds.is_empty() {
        return Err(CliError::Usage(format!("no backgrounds in {}", backgrounds_dir.display())));
    }

    let catalog = CatalogSizes { meshes: cfg.synth.meshes, backgrounds: backgrounds.len() };
    let manifests: Vec<SceneManifest> = match args.manifest.as_ref().or(cfg.paths.manifest.as_ref()) {
        Some(path) => {
            let path = require_existing("manifest", Some(path))?;
            let list = synthgen::read_jsonl(BufReader::new(File::open(&path)?))?;
            if list.len() < renders.len() {
                return Err(CliError::Usage(format!(
                    "{} has {} manifests for {} renders",
                    path.display(),
                    list.len(),
                    renders.len()
                )));
            }
            list.into_iter().take(renders.len()).collect()
        }
        None => (0..renders.len())
            .map(|i| sample_manifest_with(derive_seed(ctx.seed, i as u64), catalog, cfg.synth.scale_mode))
            .collect::<Result<_, _>>()?,
    };

    for sub in ["images", "masks", "tensors"] {
        fs::create_dir_all(out_dir.join(sub))?;
    }

    let outcomes: Vec<Result<(), CoreError>> = renders
        .par_iter()
        .enumerate()
        .map(|(i, render_path)| {
            let id = item_id(i);
            let run = || -> Result<(), CoreError> {
                let render = load_gray_image(render_path)?;
                let mask = extract_mask(&render, threshold);
                let bg_index = manifests[i].background_id;
                let bg_path = backgrounds.get(bg_index).ok_or_else(|| {
                    CoreError::OutOfRange(format!("background_id {bg_index} >= {}", backgrounds.len()))
                })?;
                let mut image = composite(&render, &mask, &load_gray_image(bg_path)?)?;
                let mut mask = mask;
                if let Some(spec) = &augmentation {
                    let item_seed = derive_seed(derive_seed(ctx.seed, i as u64), 1);
                    (image, mask) = augment(&image, &mask, &spec.with_seed(item_seed))?;
                }
                let tensor = settings.assemble(&image)?;
                image.save_png(out_dir.join("images").join(format!("{id}.png")))?;
                mask.save_png(out_dir.join("masks").join(format!("{id}.png")))?;
                save_tensor(&tensor, out_dir.join("tensors").join(format!("{id}.sat")))?;
                debug!("built {id} from {}", render_path.display());
                Ok(())
            };
            run().inspect_err(|e| error!("{id} ({}): {e}", render_path.display()))
        })
        .collect();

    synthgen::write_jsonl(BufWriter::new(File::create(out_dir.join("manifest.jsonl"))?), &manifests)?;
    let built: Vec<String> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_ok())
        .map(|(i, _)| item_id(i))
        .collect();
    let failed = renders.len() - built.len();
    if !built.is_empty() {
        let split = write_split(&out_dir.join("split.json"), &built, cfg.split.train_fraction, ctx.seed)?;
        info!(
            "built {} items into {} ({} train / {} val)",
            built.len(),
            out_dir.display(),
            split.train.len(),
            split.val.len()
        );
    }
    if failed > 0 {
        return Err(CliError::Partial { failed, total: renders.len() });
    }
    Ok(())
}

pub fn preprocess(ctx: &Context, args: &PreprocessArgs) -> Result<(), CliError> {
    let mut cfg = ctx.config.clone();
    apply_preprocess_flags(&mut cfg, &args.preprocess)?;
    let settings = cfg.preprocess.settings()?;
    let image = load_gray_image(&args.input)?;
    let tensor = match &args.composition {
        Some(c) => settings.assemble_variant(&image, parse_composition(c)?)?,
        None => settings.assemble(&image)?,
    };
    create_parent(&args.output)?;
    save_tensor(&tensor, &args.output)?;
    info!("wrote {}x{} tensor to {}", tensor.width(), tensor.height(), args.output.display());
    Ok(())
}

pub fn augment_pair(ctx: &Context, args: &AugmentArgs) -> Result<(), CliError> {
    let image = load_gray_image(&args.image)?;
    let mask = load_mask(&args.mask)?;
    let spec = ctx
        .config
        .augment
        .clone()
        .unwrap_or_else(|| AugmentationSpec::standard(0))
        .with_seed(ctx.seed);
    let (image, mask) = augment(&image, &mask, &spec)?;
    create_parent(&args.out_image)?;
    create_parent(&args.out_mask)?;
    image.save_png(&args.out_image)?;
    mask.save_png(&args.out_mask)?;
    Ok(())
}

pub fn split(ctx: &Context, args: &SplitArgs) -> Result<(), CliError> {
    let fraction = args.train_fraction.unwrap_or(ctx.config.split.train_fraction);
    let ids: Vec<String> = match (&args.ids, &args.dataset) {
        (Some(file), _) => {
            let file = require_existing("id list", Some(file))?;
            fs::read_to_string(file)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect()
        }
        (None, Some(dir)) => {
            let images = require_existing("dataset", Some(&dir.join("images")))?;
            list_images(&images)?
                .iter()
                .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(String::from))
                .collect()
        }
        (None, None) => return Err(CliError::Usage("either --ids or --dataset is required".into())),
    };
    let file = write_split(&args.out, &ids, fraction, ctx.seed)?;
    info!("split {} ids: {} train / {} val", ids.len(), file.train.len(), file.val.len());
    Ok(())
}

/// The four tensor compositions of the pre-processing ablation.
pub fn default_compositions() -> Vec<Composition> {
    use shapeseg_core::ChannelTag::{Edge, Raw};
    vec![[Raw; 3], [Edge; 3], [Edge, Raw, Raw], SHAPE_AWARE]
}

fn parse_dataset_arg(arg: &str) -> NamedPath {
    match arg.split_once('=') {
        Some((name, path)) => NamedPath { name: name.to_string(), path: PathBuf::from(path) },
        None => {
            let path = PathBuf::from(arg);
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or(arg)
                .to_string();
            NamedPath { name, path }
        }
    }
}

/// Pairs `images/<stem>.*` with `masks/<stem>.png` in each test set.
fn collect_eval_dataset(sets: &[NamedPath]) -> Result<EvalDataset, CliError> {
    let mut dataset = EvalDataset::default();
    for set in sets {
        if dataset.groups.contains(&set.name) {
            return Err(CliError::Usage(format!("test set {} given twice", set.name)));
        }
        let images = require_existing("test set", Some(&set.path.join("images")))?;
        dataset.groups.push(set.name.clone());
        for image in list_images(&images)? {
            let id = image.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let truth = set.path.join("masks").join(format!("{id}.png"));
            if !truth.exists() {
                warn!("{}: no mask for {id}", set.name);
            }
            dataset.items.push(EvalItem { id, group: set.name.clone(), image, truth });
        }
    }
    if dataset.items.is_empty() {
        return Err(CoreError::EmptyDataset.into());
    }
    Ok(dataset)
}

fn report_format(arg: Option<FormatArg>, out: &Path) -> ReportFormat {
    match arg {
        Some(FormatArg::Csv) => ReportFormat::Csv,
        Some(FormatArg::Markdown) => ReportFormat::Markdown,
        None if out.extension().is_some_and(|e| e == "md") => ReportFormat::Markdown,
        None => ReportFormat::Csv,
    }
}

pub fn evaluate(ctx: &Context, args: &EvaluateArgs) -> Result<(), CliError> {
    let mut cfg = ctx.config.clone();
    apply_preprocess_flags(&mut cfg, &args.preprocess)?;
    let settings = cfg.preprocess.settings()?;

    let sets: Vec<NamedPath> = if args.datasets.is_empty() {
        cfg.evaluate.datasets.clone()
    } else {
        args.datasets.iter().map(|d| parse_dataset_arg(d)).collect()
    };
    if sets.is_empty() {
        return Err(CoreError::EmptyDataset.into());
    }
    let compositions = if !args.compositions.is_empty() {
        args.compositions.iter().map(|c| parse_composition(c)).collect::<Result<Vec<_>, _>>()?
    } else if !cfg.evaluate.compositions.is_empty() {
        cfg.evaluate.parsed_compositions()?
    } else {
        default_compositions()
    };
    let predictor = require_existing("predictor", args.predictor.as_ref().or(cfg.evaluate.predictor.as_ref()))?;
    let dataset = collect_eval_dataset(&sets)?;

    let tmp;
    let work_dir = match &args.work_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            dir.clone()
        }
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path().to_path_buf()
        }
    };
    let reports = eval::run_ablation(
        &dataset,
        &compositions,
        &settings,
        &CommandPredictor { command: predictor },
        &work_dir,
    )?;

    create_parent(&args.out)?;
    let text = eval::render_report(&reports, report_format(args.format, &args.out))?;
    fs::write(&args.out, text)?;
    if let Some(json) = &args.json {
        create_parent(json)?;
        fs::write(json, serde_json::to_vec_pretty(&reports).map_err(CoreError::from)?)?;
    }

    let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
    let total = dataset.items.len() * compositions.len();
    info!("scored {} rows into {} ({failed} failures)", reports.len(), args.out.display());
    if failed > 0 {
        return Err(CliError::Partial { failed, total });
    }
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let input = require_existing("results file", Some(&args.input))?;
    let reports: Vec<EvalReport> =
        serde_json::from_reader(BufReader::new(File::open(input)?)).map_err(CoreError::from)?;
    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    let text = eval::render_report(&reports, format)?;
    match &args.out {
        Some(path) => {
            create_parent(path)?;
            fs::write(path, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
