use std::path::{Path, PathBuf};

use codecarta_miner::MineError;
use serde::Serialize;
use thiserror::Error;

/// Process exit codes. These are stable; scripts may match on them.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const INPUT: u8 = 4;
    pub const CONFIG: u8 = 5;
    pub const MINE: u8 = 6;
    pub const LAYOUT: u8 = 7;
    pub const BUNDLE: u8 = 8;
    pub const SYNTH: u8 = 9;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A graph or layout document that does not parse or validate.
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Mine(#[from] MineError),
    #[error("{0}")]
    Layout(String),
    #[error("{0}")]
    Bundle(String),
    #[error("{0}")]
    Synth(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::Config(_) => "config",
            CliError::Mine(_) => "mine",
            CliError::Layout(_) => "layout",
            CliError::Bundle(_) => "bundle",
            CliError::Synth(_) => "synth",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Input { .. } => exit::INPUT,
            CliError::Config(_) => exit::CONFIG,
            CliError::Mine(_) => exit::MINE,
            CliError::Layout(_) => exit::LAYOUT,
            CliError::Bundle(_) => exit::BUNDLE,
            CliError::Synth(_) => exit::SYNTH,
        }
    }
}

/// The JSON object written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport<'a> {
    pub error: &'a str,
    /// Pipeline step that failed, when running more than one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<&'a str>,
    pub message: String,
    #[serde(rename = "exitCode")]
    pub exit_code: u8,
}

/// An error tagged with the pipeline step it came from.
#[derive(Debug)]
pub struct StepError {
    pub step: Option<&'static str>,
    pub error: CliError,
}

impl From<CliError> for StepError {
    fn from(error: CliError) -> Self {
        StepError { step: None, error }
    }
}

impl StepError {
    pub fn report(&self) -> String {
        let r = ErrorReport {
            error: self.error.code(),
            step: self.step,
            message: self.error.to_string(),
            exit_code: self.error.exit_code(),
        };
        serde_json::to_string(&r).expect("error reports serialize")
    }
}

pub trait AtStep<T> {
    fn at(self, step: &'static str) -> Result<T, StepError>;
}

impl<T> AtStep<T> for Result<T, CliError> {
    fn at(self, step: &'static str) -> Result<T, StepError> {
        self.map_err(|error| StepError { step: Some(step), error })
    }
}
