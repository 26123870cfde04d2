//! Command-line front end of the `nvinit` simulator: configuration loading
//! and the `transitions`, `sweep`, `spectrum`, `optimize` and `simulate`
//! commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{parse_config, Config, OptimizerSettings};
pub use error::{CliError, Result};
