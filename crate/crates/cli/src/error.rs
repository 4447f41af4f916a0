use std::path::PathBuf;

use concordia_core::copula::ExprParseError;
use concordia_core::Error;
use thiserror::Error;

/// Process exit codes; stable across releases.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const INVALID: u8 = 3;
    pub const OUTSIDE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },

    #[error("cannot parse {what} from {text:?}")]
    Argument { what: &'static str, text: String },

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => exit::FAILURE,
            CliError::Syntax { .. } | CliError::Argument { .. } => exit::PARSE,
            CliError::Core(e) => match e {
                Error::InvalidExpression(_)
                | Error::InvalidArgument(_)
                | Error::NotAShuffle(_)
                | Error::NotComputableExactly(_)
                | Error::OutOfFace { .. } => exit::INVALID,
                Error::OutOfRegion { .. } => exit::OUTSIDE,
                Error::Internal(_) => exit::FAILURE,
            },
        }
    }

    pub fn from_expr(path: PathBuf, e: ExprParseError) -> Self {
        match e {
            ExprParseError::Syntax { .. } => CliError::Syntax { path, message: e.to_string() },
            ExprParseError::Invalid(inner) => CliError::Core(inner),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
