use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error in {source_name}{}: {message}", row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    Data {
        source_name: String,
        row: Option<usize>,
        message: String,
    },

    #[error("numerical error at omega = {omega} rad/s (condition estimate {condition:.3e}): {message}")]
    Numerical {
        omega: f64,
        condition: f64,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("run {run} failed: {message}")]
    Run { run: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(source_name: impl Into<String>, row: Option<usize>, message: impl Into<String>) -> Self {
        Error::Data {
            source_name: source_name.into(),
            row,
            message: message.into(),
        }
    }
}
