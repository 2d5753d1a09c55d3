use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeterError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A malformed record, located by file and 1-based line.
    #[error("{path}:{line}: {message}")]
    Record { path: PathBuf, line: usize, message: String },
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    /// An engine error, tagged with the module that raised it.
    #[error("{module}: {source}")]
    Engine {
        module: &'static str,
        #[source]
        source: aai_core::Error,
    },
    /// Inputs are well-formed but fail admissibility or a required level.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
}

impl MeterError {
    pub fn exit_code(&self) -> i32 {
        match self {
            MeterError::Validation(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, MeterError>;

/// Tags a core result with the module it came from.
pub trait Context<T> {
    fn module(self, module: &'static str) -> Result<T>;
}

impl<T> Context<T> for aai_core::Result<T> {
    fn module(self, module: &'static str) -> Result<T> {
        self.map_err(|source| MeterError::Engine { module, source })
    }
}

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> MeterError {
    let path = path.into();
    move |source| MeterError::Io { path, source }
}
