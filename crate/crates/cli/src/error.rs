use thiserror::Error;

/// Failure of a command, carrying enough to pick an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{sample}: {source}")]
    Sample {
        sample: String,
        #[source]
        source: mpsig_core::Error,
    },

    #[error(transparent)]
    Core(#[from] mpsig_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

fn core_exit_code(e: &mpsig_core::Error) -> i32 {
    use mpsig_core::Error::*;
    match e {
        InvalidParameter(_) => EXIT_USAGE,
        Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config { .. } | CliError::Io(_) => EXIT_INPUT,
            CliError::Sample { source, .. } => core_exit_code(source),
            CliError::Core(e) => core_exit_code(e),
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
