use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const VERIFICATION_FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot encode output: {0}")]
    Encoding(String),
}

impl CliError {
    pub(crate) fn encoding(e: serde_json::Error) -> Self {
        CliError::Encoding(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Encoding(_) => exit::IO,
        }
    }
}

impl From<envyline::Error> for CliError {
    fn from(e: envyline::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
