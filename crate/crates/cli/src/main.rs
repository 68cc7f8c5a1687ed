mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use hawkes_core::HawkesError;

use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] HawkesError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Exit statuses.
const OK: u8 = 0;
const VALIDATION_FAILED: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(true) => ExitCode::from(OK),
        Ok(false) => ExitCode::from(VALIDATION_FAILED),
        Err(e) => {
            eprintln!("hawkes: {e}");
            ExitCode::from(USAGE)
        }
    }
}
