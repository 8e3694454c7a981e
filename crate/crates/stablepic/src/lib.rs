//! File formats, chart rendering and the command-line driver for `stablepic-core`.

pub mod chart;
pub mod cli;
pub mod document;
pub mod error;
pub mod report;

pub use error::CliError;
