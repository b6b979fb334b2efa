//! Data-pipeline building blocks for shape-aware body-part segmentation.
//!
//! - [`image`]: grayscale rasters, float maps and binary masks with PNG/PGM I/O.
//! - [`tensor`]: the three-channel network input and its SAT1 container.
//! - [`preprocess`]: edge response maps, CLAHE, and tensor assembly.
//! - [`synthgen`]: scene manifests, mask extraction, compositing, augmentation, splits.
//! - [`eval`]: IoU, dataset statistics, ablation runs and reports.

pub mod error;
pub mod eval;
pub mod filter;
pub mod image;
pub mod preprocess;
pub mod synthgen;
pub mod tensor;

pub use error::{Error, Result};
pub use image::{load_gray_image, load_mask, BinaryMask, FloatMap, GrayImage};
pub use tensor::{read_tensor, save_tensor, ChannelTag, Composition, InputTensor};
