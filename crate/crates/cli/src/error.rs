use std::path::PathBuf;

use thiserror::Error;

/// A configuration problem, located by source and line when known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{key}: {message}", location(.source_name, *.line))]
pub struct ConfigError {
    pub source_name: String,
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

fn location(source: &str, line: Option<usize>) -> String {
    match line {
        Some(l) => format!("{source}:{l}: "),
        None => format!("{source}: "),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] rwrs_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const PARTIAL: i32 = 2;
}
