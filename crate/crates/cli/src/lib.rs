//! Command-line companion of `cdpr-core`: configuration files, CSV/JSON/
//! binary artifacts, parallel grid evaluation, and the `cdpr` binary's
//! subcommand implementations.

use std::fmt;

pub mod commands;
pub mod config;
pub mod formats;
pub mod parallel;
pub mod report;
pub mod runner;

/// CLI failure classes, mapped to exit codes: configuration and parse
/// problems exit with 2, runtime failures with 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<cdpr_core::Error> for CliError {
    fn from(e: cdpr_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
