//! IO, file formats, reporting and the benchmark harness around
//! `eteq-core`. The `eteq` binary in this crate exposes the engine on
//! the command line.

pub mod harness;
pub mod io;
pub mod report;
pub mod stats;

use std::path::PathBuf;

/// Errors surfaced by the tool layer; [`Error::exit_code`] maps them to
/// the documented process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] eteq_core::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Stats(#[from] stats::StatsError),
}

impl Error {
    /// 3 for bad input, 4 for exceeded caps and limits.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Engine(eteq_core::Error::CapExceeded { .. })
            | Error::Engine(eteq_core::Error::CapacityExceeded { .. }) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}
