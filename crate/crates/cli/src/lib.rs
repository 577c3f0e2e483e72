//! `fts` command-line front end.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 invalid configuration,
//! 3 malformed input, 4 numerical failure.

pub mod commands;
pub mod config;
pub mod output;

use fts_core::FtsError;
use thiserror::Error;

pub use commands::run;
pub use config::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<FtsError> for CliError {
    fn from(e: FtsError) -> Self {
        match e {
            FtsError::InvalidConfig(_) | FtsError::InvalidKernel(_) => CliError::Config(e.to_string()),
            e if e.is_numeric() => CliError::Numeric(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

/// Applies `FTS_THREADS` (0 or unset = one thread per core) to the global
/// thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("FTS_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("FTS_THREADS must be an integer, got '{v}'")))?,
        Err(_) => 0,
    };
    if threads > 0 {
        // A pool may already exist when embedded in tests; that is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}
