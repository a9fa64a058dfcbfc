//! Command-line front end: figure reproductions, sweeps and scalar queries
//! over the fidelity engine, with CSV/JSON data, SVG views and run manifests.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod grid;
pub mod manifest;
pub mod oracle;
pub mod svg;
pub mod sweep;
pub mod table;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
