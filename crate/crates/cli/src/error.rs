use shapeseg_core::Error as CoreError;
use thiserror::Error;

/// Exit status contract: 0 success, 1 partial or runtime failure, 2 usage or config error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} items failed")]
    Partial { failed: usize, total: usize },
    #[error(transparent)]
    Core(CoreError),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Partial { .. } | Self::Core(_) | Self::Other(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::MissingFile(_)
            | CoreError::UnsupportedFormat(_)
            | CoreError::InvalidParameter(_)
            | CoreError::Precondition(_)
            | CoreError::UnknownTag(_)
            | CoreError::EmptyDataset
            | CoreError::EmptyList => Self::Usage(e.to_string()),
            other => Self::Core(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Core(CoreError::Io(e))
    }
}
