use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad magic")]
    BadMagic,
    #[error("version mismatch: expected 1, found {0}")]
    VersionMismatch(u32),
    #[error("truncated payload")]
    TruncatedPayload,
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unknown tag: {0}")]
    UnknownTag(String),

    #[error("external backend failure: {0}")]
    ExternalBackend(String),
    #[error("shape mismatch from external backend: expected {expected} bytes, got {actual}")]
    ExternalShape { expected: usize, actual: usize },
    #[error("out-of-range external values")]
    ExternalRange,

    #[error("predictor failure: {0}")]
    Predictor(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("empty list")]
    EmptyList,

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
