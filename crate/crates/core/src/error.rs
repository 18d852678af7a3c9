use std::path::PathBuf;

use thiserror::Error;

use crate::grid::CellCoord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell ({}, {}) is outside a {height}x{width} grid", .coord.row, .coord.col)]
    OutOfBounds {
        coord: CellCoord,
        height: usize,
        width: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("gamma_lower: order {0} not in {{1, 2, 3}}")]
    GammaOrder(u32),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Display shows the path; the OS error is the source.
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("map {height}x{width} exceeds simulator capacity {max}x{max}")]
    Capacity {
        height: usize,
        width: usize,
        max: usize,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("robot pose ({}, {}) is on an occupied cell", .0.row, .0.col)]
    PoseOccupied(CellCoord),

    #[error("no reachable frontier candidates")]
    ExplorationComplete,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
