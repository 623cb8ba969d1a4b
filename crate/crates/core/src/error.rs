use std::path::PathBuf;

use thiserror::Error;

/// Invalid parameters or a malformed scenario/config document.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{}: {path} (line {line}, column {column}): {message}", .source_name)]
    Parse {
        source_name: String,
        /// Dotted field path into the document, `.` for the root.
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot read {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Field the error is attributed to, when known.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Invalid { field, .. } => Some(field),
            Self::Parse { path, .. } => Some(path),
            Self::Read { .. } => None,
        }
    }
}

/// Failure while writing or reading run artifacts.
#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", .path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}:{line}: {source}", .path.display())]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {reason}", .path.display())]
    Malformed { path: PathBuf, reason: String },
}
