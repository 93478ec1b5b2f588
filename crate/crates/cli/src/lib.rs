//! Command-line driver: argument and config-file parsing, experiment presets,
//! output writing and post-processing.

pub mod commands;
pub mod config;
pub mod presets;
pub mod report;

use std::fmt;
use std::path::PathBuf;

use quasisol::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

/// Environment variable naming the base output directory.
pub const OUT_ENV: &str = "QUASISOL_OUT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Exit status for a library error: bad input is a usage error, an energy
/// drift past the bound is an accuracy abort, anything else a solver failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::LengthMismatch { .. }
        | Error::NoSolitaryWave { .. }
        | Error::SaturationViolation { .. }
        | Error::InsufficientWindow(_)
        | Error::TooFewSamples { .. } => EXIT_USAGE,
        Error::AccuracyAbort { .. } => EXIT_ACCURACY,
        _ => EXIT_SOLVER,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// `--out` if given, else `$QUASISOL_OUT/<leaf>`, else `out/<leaf>`.
pub fn output_dir(flag: Option<PathBuf>, leaf: &str) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    let base = std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"));
    base.join(leaf)
}

/// Parses `args` (program name first), runs the command and returns the
/// one-line summary or the error with its exit status.
pub fn run(args: Vec<String>) -> Result<String, CliError> {
    use clap::{CommandFactory, Parser};
    let args = config::merge_config(args, &commands::Cli::command())?;
    let cli = commands::Cli::try_parse_from(args).map_err(|e| CliError {
        code: if e.use_stderr() { EXIT_USAGE } else { 0 },
        message: e.render().to_string(),
    })?;
    commands::dispatch(cli)
}
