//! Command-line harness around `accel-core`: instance generation, method
//! batches with CSV/SVG output, diagnostics and schedule dumps.

pub mod config;
pub mod run;
pub mod schedule;
pub mod svg;
pub mod verify;

use std::fmt;

/// Exit status 2: bad arguments, config or instance.
pub const EXIT_USAGE: u8 = 2;
/// Exit status 1: a check or a method in the batch failed.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}
