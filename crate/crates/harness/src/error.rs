use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading, running or writing an experiment.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] yo_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// The experiment description is malformed or inconsistent.
    #[error("invalid experiment spec: {0}")]
    Spec(String),

    /// A row of an externally supplied results file could not be used.
    #[error("{}, row {row}: {msg}", path.display())]
    External { path: PathBuf, row: usize, msg: String },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
