use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between reading a time history and writing
/// a spectrum.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-uniform sampling: {0}")]
    Sampling(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("frequency {freq_hz} Hz is too close to Nyquist ({limit_hz} Hz allowed)")]
    Alias { freq_hz: f64, limit_hz: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("frequency grid mismatch: {0}")]
    Grid(String),

    #[error("{0}")]
    Range(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
