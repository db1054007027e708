//! Experiment runner for the SPDE laboratory: configuration, replicate
//! parallelism, CSV/JSON/archive output and the acceptance suite.

pub mod acceptance;
pub mod archive;
pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod runner;

pub use error::{LabError, Result};
