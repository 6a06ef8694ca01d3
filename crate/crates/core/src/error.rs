use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped so the command-line front end can map them onto
/// exit codes: input and parse problems, invalid parameters, and numeric
/// failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unknown attribute `{name}` (available: {})", available.join(", "))]
    UnknownAttribute { name: String, available: Vec<String> },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("mass mismatch: {left} vs {right}")]
    MassMismatch { left: i64, right: i64 },

    #[error("homology degree {0} was not computed")]
    MissingDegree(usize),

    #[error("measure #{index}: {reason}")]
    IncompatibleMeasure { index: usize, reason: String },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
