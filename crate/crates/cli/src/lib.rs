//! Batch driver for the rwrs laboratory: configs in, csv and JSON out.

pub mod cli;
pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;

pub use cli::main_with_args;
pub use error::{exit, CliError, ConfigError};
