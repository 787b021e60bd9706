//! Command-line front end: config handling, output formats and the
//! `identities`, `spectrum`, `solve` and `taylor` commands.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

pub mod args;
pub mod config;
pub mod output;
pub mod run;

pub use args::{parse_args, Cli, Invocation};
pub use config::{Command, RunConfig};
pub use run::{run, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(#[from] mac_stokes::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage errors, 3 for IO failures, 1 for failed computations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) => u8::try_from(e.exit_code()).unwrap_or(2),
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
            CliError::Io { .. } => 3,
        }
    }
}
