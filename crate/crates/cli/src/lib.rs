//! Command-line front end: scenario files in, JSON reports and sweep CSV out.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario_file;

pub use error::CliError;
