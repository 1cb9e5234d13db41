//! Configuration, result caching and output writers behind the
//! `fractal-dims` command line tool.

pub mod cache;
pub mod commands;
pub mod config;
pub mod io;
pub mod manifest;
pub mod svg;

pub use commands::{execute, run, Command, OutFile, Output, RunOptions};
pub use manifest::Manifest;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: fractal_dims::Error,
    },

    #[error("i/o on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Attach the module name to core errors.
pub(crate) trait Context<T> {
    fn ctx(self, module: &'static str) -> Result<T>;
}

impl<T> Context<T> for fractal_dims::Result<T> {
    fn ctx(self, module: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Module { module, source })
    }
}

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Config(msg.into()))
}
