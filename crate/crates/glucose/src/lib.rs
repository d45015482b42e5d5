//! Files, reports and the command-line front end for `glucose-core`.

pub mod cli;
pub mod config;
pub mod csv_io;
mod error;
pub mod model;
pub mod plot;
pub mod report;

pub use error::{Error, Result};
