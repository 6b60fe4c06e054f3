//! Command line driver for the xxz numerical laboratory: run configuration,
//! manifests, record persistence and the `xxz` subcommands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod persist;

pub use error::{HarnessError, Result};
