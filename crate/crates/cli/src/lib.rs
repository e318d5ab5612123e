//! Command-line front end for `hstn-core`: experiment files, parameter
//! sweeps, CSV and SVG output, and the figure recipes.

pub mod app;
pub mod ceiling;
pub mod config;
pub mod error;
pub mod mobility_check;
pub mod output;
pub mod plot;
pub mod recipes;
pub mod sweep;

pub use error::{CliError, CliResult};
