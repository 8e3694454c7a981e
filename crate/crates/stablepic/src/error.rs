use std::path::PathBuf;

use stablepic_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed document {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error("window exhausted: {0}")]
    Window(Error),
    #[error(transparent)]
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::WindowTooSmall { .. } | Error::CapExhausted { .. } => CliError::Window(e),
            e => CliError::Core(e),
        }
    }
}
