//! Scenario-driven front end for `tdho-core`: classical solve, closed-form
//! wavefunctions, verification suites, geometric phases and invariant
//! matrix elements, written as CSV and JSON.

pub mod commands;
pub mod config;

use std::process::ExitCode;

pub use config::{Overrides, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid scenario; exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// A verification check failed; exit code 1.
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] tdho_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

/// Applies `TDHO_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TDHO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("TDHO_THREADS = {raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}
