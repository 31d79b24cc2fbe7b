//! Scenario files, CSV/SVG output and the command drivers behind the CLI.

pub mod commands;
pub mod csv_out;
pub mod scenario;
pub mod svg;

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::Error;

pub use commands::{
    cmd_estimate, cmd_fringes, cmd_scan, cmd_simulate, format_estimates, RunReport,
};
pub use scenario::{parse_scenario, parse_scenario_str, Scenario};

/// Failures of a command, each with its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config {
        field: String,
        message: String,
        suggestion: Option<String>,
    },
    Io {
        path: PathBuf,
        message: String,
    },
    Core(Error),
}

impl RunError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        RunError::Config {
            field: field.into(),
            message: message.into(),
            suggestion: None,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    /// 2 config, 3 resolution, 4 domain, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Core(Error::Resolution { .. }) => 3,
            RunError::Core(_) => 4,
            RunError::Io { .. } => 5,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            RunError::Config { .. } => "config",
            RunError::Core(Error::Resolution { .. }) => "resolution",
            RunError::Core(_) => "domain",
            RunError::Io { .. } => "io",
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config {
                field,
                message,
                suggestion,
            } => {
                write!(f, "config error at `{field}`: {message}")?;
                if let Some(s) = suggestion {
                    write!(f, " (did you mean `{s}`?)")?;
                }
                Ok(())
            }
            RunError::Io { path, message } => {
                write!(f, "I/O error on {}: {message}", path.display())
            }
            RunError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}
