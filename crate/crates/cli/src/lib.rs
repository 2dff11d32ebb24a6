//! Batch front-end for `catlab-core`: figure-data sweeps written as CSV with a
//! checksummed `manifest.json` per run.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod table;

pub use commands::{compute, run, CliError, Command, Outcome};
pub use config::{ConfigError, RunConfig, StateLabel};
pub use manifest::RunManifest;
pub use table::{Cell, Table};
