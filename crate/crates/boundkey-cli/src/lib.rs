//! Command-line front end: state files on disk, CSV scans, and the verdict
//! and threshold reports. All analysis lives in the boundkey library.

use std::fmt;

pub mod commands;
pub mod gridspec;
pub mod statefile;

/// Failures split by who must act: Usage means the invocation or its input
/// files are wrong (exit 2); Validation means a state failed an internal
/// consistency or positivity check (exit 3).
#[derive(Clone, Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<boundkey::Error> for CliError {
    fn from(e: boundkey::Error) -> Self {
        match e {
            boundkey::Error::InvalidParameter(_) | boundkey::Error::DimensionMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub fn run(cli: commands::Cli) -> Result<(), CliError> {
    match cli.command {
        commands::Command::Construct(args) => commands::run_construct(&args),
        commands::Command::Check(args) => commands::run_check(&args),
        commands::Command::Scan(args) => commands::run_scan(&args),
        commands::Command::Noise(args) => commands::run_noise(&args),
        commands::Command::Erasure(args) => commands::run_erasure(&args),
        commands::Command::EntropyMax(args) => commands::run_entropy_max(&args),
    }
}
