use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("unsupported degree {degree} for {element} (supported {min}..={max})")]
    UnsupportedDegree {
        element: &'static str,
        degree: usize,
        min: usize,
        max: usize,
    },

    #[error("node table {name}: {reason}")]
    NodeTable { name: String, reason: String },

    #[error("quadrature rule failed moment check: {0}")]
    MomentCheck(String),

    #[error("basis evaluation matrix is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),

    #[error("SBP operator residual {residual:e} exceeds tolerance {tolerance:e} ({what})")]
    OperatorResidual {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("connectivity graph is disconnected ({components} components); increase alpha")]
    DisconnectedGraph { components: usize },

    #[error("singular graph-Laplacian system")]
    SingularLaplacian,

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("unmatched face node: element {elem}, face {face}, node {node}")]
    UnmatchedFaceNode { elem: usize, face: usize, node: usize },

    #[error("flux correction has nonzero cross-element entry {value:e}")]
    CrossElementCorrection { value: f64 },

    #[error("negative water height {h:e} at element {elem}, node {node}")]
    NegativeHeight { elem: usize, node: usize, h: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{case} has no exact solution")]
    MissingExactSolution { case: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SolverError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SolverError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
