//! Command-line front end: sweeps written as CSV or JSON, and the validation suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

pub use commands::{run, summary_path};
pub use config::{Cli, SweepConfig};
pub use error::{CliError, CliResult};
