use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] rada_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}, line {line}: {reason}")]
    Parse { path: String, line: usize, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("normalized variance undefined: the data matrix is zero")]
    ZeroVariance,
    #[error("JSON output: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
