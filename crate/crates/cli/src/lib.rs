//! Config-driven front end: runs, manufactured-solution studies, entropy
//! roots and representation-formula reconstructions.

pub mod commands;
pub mod config;
pub mod harness;
pub mod output;

use std::process::ExitCode;

use thiserror::Error;

/// Every failure a command can report, with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("solver error: {0}")]
    Runtime(#[from] mhd1d_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("checks failed: {0}")]
    ChecksFailed(String),
}

impl CliError {
    /// 2 for bad input, 1 for anything that went wrong while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

pub fn exit_code(result: &Result<(), CliError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(e.exit_code()),
    }
}
