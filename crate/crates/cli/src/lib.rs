//! Experiment harness around `ballast-core`: declarative JSON experiment
//! configs, seeded parallel trials, CSV/JSON outputs, and graph-file import.

pub mod config;
pub mod io;
pub mod runner;

use std::fmt;

/// Harness-level failure, split by exit code: config errors exit 1, runtime
/// failures exit 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn config(field: &str, message: impl fmt::Display) -> Self {
        CliError::Config(format!("{field}: {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
