use std::fmt;

use roseland::Error;

/// Process exit codes.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_CAPACITY: u8 = 4;
pub const EXIT_MISSING_INPUT: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingInput(String),
    Lib(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::MissingInput(_) => EXIT_MISSING_INPUT,
            CliError::Lib(e) => match e {
                Error::Config(_) | Error::Density(_) | Error::Dim(_) | Error::Index(_) => EXIT_USAGE,
                Error::Value(_) | Error::Convergence(_) | Error::Quadrature(_) => EXIT_NUMERIC,
                Error::Capacity(_) => EXIT_CAPACITY,
                Error::Io(_) | Error::Format(_) => EXIT_MISSING_INPUT,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::MissingInput(m) => write!(f, "missing input: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
