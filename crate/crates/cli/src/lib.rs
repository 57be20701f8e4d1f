//! Command-line driver: configuration, the result store, plot tables and
//! the five commands `verify`, `solve`, `sweep`, `fit` and `global-check`.

pub mod commands;
pub mod config;
pub mod plot;
pub mod store;

use std::fmt::Display;
use std::path::Path;

pub use commands::{run, Exit};
pub use config::{parse_config, RunConfig};
pub use plot::{emit_plot_data, read_error_curve, read_lifespan_table, read_snapshot, PlotData};
pub use store::ResultStore;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(clap::Error),

    #[error("`{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Numerics(#[from] dampwave::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("formatting output: {0}")]
    Format(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, reason: impl Display) -> Self {
        Self::Parse {
            path: path.display().to_string(),
            reason: reason.to_string(),
        }
    }
}
