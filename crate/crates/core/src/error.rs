use thiserror::Error;

use crate::model::{ArgumentId, Edge};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgumentId),

    #[error("duplicate argument `{0}`")]
    DuplicateArgument(ArgumentId),

    #[error("base score {score} of argument `{argument}` is outside [0, 1]")]
    BaseScoreOutOfRange { argument: ArgumentId, score: f64 },

    #[error("base score override is missing argument `{0}`")]
    MissingBaseScore(ArgumentId),

    #[error("edge {0} appears more than once")]
    DuplicateEdge(Edge),

    #[error("pair ({0}, {1}) is both an attack and a support")]
    PolarityConflict(ArgumentId, ArgumentId),

    #[error("edge subset refers to edge index {index}, but the framework has {len} edges")]
    InvalidSubset { index: usize, len: usize },

    #[error("edge {0} is not part of the framework")]
    UnknownEdge(Edge),

    #[error("invalid convergence configuration: {0}")]
    InvalidConvergenceConfig(String),

    #[error(
        "exact attribution over {edges} edges exceeds the cap of {cap}; use Monte Carlo approximation instead"
    )]
    ExactCapExceeded { edges: usize, cap: usize },

    #[error(
        "strengths did not converge (residual {residual:e} after {iterations} sweeps) on the edge subset {{{}}}",
        format_edges(.subset)
    )]
    NotWellDefined {
        subset: Vec<Edge>,
        residual: f64,
        iterations: usize,
    },

    #[error(
        "{failed} of {total} Monte Carlo samples did not converge (allowed fraction {allowed})"
    )]
    TooManyFailedSamples {
        failed: usize,
        total: usize,
        allowed: f64,
    },

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("attribution does not match the framework: {0}")]
    AttributionMismatch(String),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("document syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document field `{field}`: {message}")]
    InvalidField { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_edges(edges: &[Edge]) -> String {
    edges
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
