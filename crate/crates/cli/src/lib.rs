//! Library side of the `qdcheck` binary: configuration, the three
//! subcommands, and report output.

pub mod commands;
pub mod config;
pub mod presets;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("assertion failed: {0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Math(_) => 2,
        }
    }
}

/// Process exit status for the outcome of a run: 0 when every check held,
/// 2 when a numerical check failed, 1 for configuration or i/o problems.
pub fn exit_status(result: &Result<bool, CliError>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => e.exit_code() as u8,
    }
}
