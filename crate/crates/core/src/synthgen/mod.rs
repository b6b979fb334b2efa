//! The renderer-independent half of the synthetic data pipeline.

mod augment;
mod manifest;
mod mask;
mod rng;
mod split;

pub use augment::{
    augment, flip_horizontal, flip_mask_horizontal, flip_mask_vertical, flip_vertical, AugmentationSpec,
    MotionBlurOp, RangeOp,
};
pub use manifest::{
    read_jsonl, sample_manifest, sample_manifest_with, write_jsonl, CatalogSizes, ScaleMode, SceneManifest,
    BACKGROUND_CATALOG, CAMERA_COUNT, LIGHT_COUNT, LIGHT_RANGE, MESH_CATALOG, ROTATION_MAX_DEG, SCALE_SPREAD,
    TRANSLATION_MAX_M,
};
pub use mask::{composite, extract_mask, fit_background, DEFAULT_MASK_THRESHOLD};
pub use rng::{derive_seed, seeded_rng, splitmix64, SeededRng};
pub use split::{split_dataset, train_count, Split};
