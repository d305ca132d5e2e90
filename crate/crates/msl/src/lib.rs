//! File formats, experiment configs, parallel evaluation and report output
//! for `msl-core`.
//!
//! User-facing element ids are 1-based everywhere in this crate.

pub mod config;
pub mod experiments;
pub mod format;
pub mod report;

use std::path::Path;

pub use config::{Config, Experiment};
pub use experiments::{run, RunSummary};

/// Process exit codes of the `msl` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OUTPUT: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const LEDGER_VIOLATION: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{origin}:{line}: {message}")]
    Parse { origin: String, line: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error(transparent)]
    Core(#[from] msl_core::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => exit::PARSE,
            Error::Validation(_) | Error::Read { .. } | Error::Core(_) => exit::VALIDATION,
            Error::Write { .. } => exit::OUTPUT,
        }
    }

    pub(crate) fn parse(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { origin: origin.to_string(), line, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.display().to_string(), source })
}
