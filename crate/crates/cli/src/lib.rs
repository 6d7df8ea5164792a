//! Command line, run configuration and plain-text file formats for the
//! `rcd-core` solver.

use std::path::PathBuf;

pub mod config;
pub mod output;
pub mod run;

pub use config::{Cli, Command, FileConfig, ModeLabel, RunArgs, RunConfig};
pub use run::{run, run_case, WallClock};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("write failed: {0}")]
    Write(std::io::Error),
    #[error("{}: {source}", path.display())]
    ConfigFile {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("{0}")]
    Config(String),
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Solver(#[from] rcd_core::Error),
}
