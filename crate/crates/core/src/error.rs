use thiserror::Error;

use crate::regress::RegressError;
use crate::verdoorn::Specification;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no growth observations: {0}")]
    EmptyResult(String),

    #[error("{spec} estimation failed: {source}")]
    Estimation {
        spec: Specification,
        #[source]
        source: RegressError,
    },

    #[error("regression failed: {0}")]
    Regress(#[from] RegressError),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("insufficient units: need at least {needed} regions, found {found}")]
    InsufficientUnits { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal invariant breached: {0}")]
    Invariant(String),

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Parse { .. } | Error::Config(_) => 2,
            Error::Validation(_) | Error::EmptyResult(_) | Error::InsufficientUnits { .. } => 3,
            Error::Estimation { .. } | Error::Regress(_) | Error::InvalidComparison(_) => 4,
            Error::Invariant(_) => 5,
            Error::Cell { source, .. } => source.exit_code(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        let message = err.to_string();
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => Error::parse(line, message),
        }
    }
}
