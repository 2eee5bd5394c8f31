use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("insufficient history: need at least {needed} observations, got {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn insufficient(needed: usize, available: usize) -> Self {
        Error::InsufficientHistory { needed, available }
    }
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight {w} outside [0, 1]")))
    }
}
