//! Command-line front end for the `ringecho` solvers: single solves, echo
//! trains, sweeps, figure data and Maxwell-Bloch verification, all written as CSV.

pub mod angle;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod sweep;
pub mod table;

pub use commands::{run, Cli, Command};
pub use config::RunConfig;
pub use error::CliError;
