//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{context}: non-finite entry at ({row}, {col})")]
    NonFinite {
        context: &'static str,
        row: usize,
        col: usize,
    },

    #[error("rank deficient to tolerance: column {col} (0-based) has pivot {pivot:.3e} <= {tol:.3e}")]
    RankDeficient { col: usize, pivot: f64, tol: f64 },

    #[error("{context}: columns not orthonormal, ||Q'Q - I||_2 = {deviation:.3e} > {tol:.3e}")]
    NotOrthonormal {
        context: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("eigendecomposition / SVD did not converge")]
    NoConvergence,

    #[error("exact gap mode requires a tail spectrum, none is available")]
    TailRequired,

    #[error("full spectrum of the original matrix required for the classical bound")]
    FullSpectrumRequired,

    #[error("cluster {first:?} overlaps cluster {second:?}")]
    OverlappingClusters {
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("cluster invariant violated: theta[{index}] = {theta} outside [{lo}, {hi}]")]
    ClusterMembership {
        index: usize,
        theta: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("structure file is malformed: {0}")]
    Structure(String),

    #[error("failed to write {path}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to read {path}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
