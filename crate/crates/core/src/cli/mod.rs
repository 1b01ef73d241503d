//! Command-line front end.

pub mod args;
pub mod commands;
pub mod config;
pub mod envelope;
pub mod json;
pub mod matrix_file;
pub mod output;

use std::fmt;

use crate::error::Error;

pub use args::Cli;
pub use commands::execute;
pub use config::{Command, ExperimentConfig, OutputFormat};
pub use envelope::ResultEnvelope;

/// Failure categories with distinct process exit codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    ConfigInvalid(String),
    FileIo(String),
    DimensionMismatch(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::FileIo(_) => 3,
            CliError::DimensionMismatch(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::ConfigInvalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::FileIo(m) => write!(f, "file error: {m}"),
            CliError::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DimensionMismatch { .. } | Error::BadShape { .. } => CliError::DimensionMismatch(msg),
            Error::Io(_) | Error::Parse(_) => CliError::FileIo(msg),
            Error::NonSquare { .. }
            | Error::DimensionTooLarge(_)
            | Error::NotUnitary(_)
            | Error::InvalidState(_)
            | Error::NotPure
            | Error::UnknownGate(_)
            | Error::BadParameter(_)
            | Error::BadDimension { .. }
            | Error::EmptyProbeSet
            | Error::EmptyList
            | Error::OutOfRange { .. }
            | Error::NonPhysicalProbe(_) => CliError::ConfigInvalid(msg),
            Error::NonFinite | Error::Consistency(_) => CliError::Other(msg),
        }
    }
}

/// Parses arguments, runs the command and writes its output; returns the
/// process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli
        .into_config()
        .and_then(|cfg| execute(&cfg).and_then(|env| output::emit(&env, &cfg)));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
