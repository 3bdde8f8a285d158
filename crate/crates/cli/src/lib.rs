//! Command-line front end for `eoa-core`: QDM/QENS file formats, reports in
//! text or JSON, and the casebook of worked values.

pub mod app;
pub mod casebook;
pub mod error;
pub mod format;
pub mod report;

pub use app::{run, Cli, Command, Outcome};
pub use error::CliError;
