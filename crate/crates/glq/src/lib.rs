//! Verification driver for the GL_q(n) connection toolkit: run configuration,
//! suites, reports and JSON shapes.

pub mod config;
pub mod report;
pub mod sampling;
pub mod serial;
pub mod suites;

pub use config::{ConfigError, Mode, RunConfig, SigmaChoice, Suite};
pub use report::{Check, Report, Status};
pub use suites::{run, RunError};
