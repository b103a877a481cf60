use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ingest failed for {path}: {reason}")]
    Ingest { path: PathBuf, reason: String },

    #[error("no documents found under {0}")]
    EmptyCorpus(PathBuf),

    #[error("parse error in {source_name} at line {line}: {reason}")]
    Parse {
        source_name: String,
        line: usize,
        reason: String,
    },

    #[error("invalid JSON in {source_name}: {source}")]
    Json {
        source_name: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("usage: {0}")]
    Usage(String),

    #[error("unithood evidence undefined: {0}")]
    UndefinedEvidence(String),

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),

    #[error("hit-count provider inconsistent for ({x}, {y}): {reason}")]
    Provider { x: String, y: String, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("metric unavailable: {0}")]
    MetricUnavailable(&'static str),

    #[error("phase `{phase}` requires missing artifact `{file}`")]
    Dependency { phase: String, file: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(source_name: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            source_name: source_name.into(),
            source,
        }
    }
}
