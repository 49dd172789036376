use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A configuration problem tied to a key and, when it came from a file, a line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn at(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn with_line(mut self, line: Option<usize>) -> Self {
        if self.line.is_none() {
            self.line = line;
        }
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed CSV at line {line}: {message}", path.display())]
    CsvFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(
        "power quadrature did not converge: {coarse:e} W with {nodes} nodes vs {fine:e} W with {} nodes (relative change {relative:e} > {tolerance:e})",
        2 * nodes
    )]
    QuadratureNotConverged {
        nodes: usize,
        coarse: f64,
        fine: f64,
        relative: f64,
        tolerance: f64,
    },

    #[error("consistency check failed at row {row}: {message}")]
    Consistency { row: usize, message: String },

    #[error("non-finite value in column '{column}' of row {row}")]
    NonFinite { row: usize, column: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
