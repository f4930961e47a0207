//! Command-line verification suites for the fockflow models.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Config, ConfigError, ModelKind};
pub use report::{Record, Report};
pub use suites::{criterion, run, Suite};
