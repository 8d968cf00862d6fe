//! Error type shared across the pipeline, with stable exit-code categories.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or unmet precondition (missing upstream outputs,
    /// bad parameter ranges, degenerate inputs by construction).
    #[error("config error: {0}")]
    Config(String),

    /// The input data contradicts the catalog or its own invariants.
    #[error("dataset integrity error: {0}")]
    DatasetIntegrity(String),

    /// A numeric routine produced or encountered a non-finite value, or a
    /// quantity that is undefined for the given input.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error at {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error at {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::DatasetIntegrity(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the error category. Documented in the README.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::DatasetIntegrity(_) => 3,
            Error::Numerical(_) => 4,
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => 5,
        }
    }

    /// One-line category tag printed on failure, e.g. `config`.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::DatasetIntegrity(_) => "dataset-integrity",
            Error::Numerical(_) => "numerical",
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => "io",
        }
    }
}
