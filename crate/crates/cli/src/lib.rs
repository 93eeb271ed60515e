//! File formats, configuration and experiment drivers behind the `shapecode`
//! command-line tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod format;
pub mod json;
pub mod rng;
pub mod stream;

pub use error::{CliError, Result};
