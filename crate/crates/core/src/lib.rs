//! Quantitative bipolar argumentation frameworks, gradual semantics and
//! Shapley-based attribution of attack and support relations.

pub mod attribution;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod model;
pub mod properties;
pub mod semantics;

pub use io::datasets;

pub use attribution::{
    classify_contribution, efficiency_decomposition, marginal_contribution, rae_approx, rae_exact,
    AttributionMap, Contribution, Method,
};
pub use error::{Error, Result};
pub use graph::{
    classify_edge, paths_to_topic, predict_sign, EdgeClass, PathToTopic, SignPrediction,
};
pub use io::{export_dot, parse_qbaf, path_contribution, serialize_qbaf};
pub use model::{Argument, ArgumentId, Edge, EdgeId, EdgeSubset, Polarity, Qbaf, QbafBuilder};
pub use semantics::{evaluate, ConvergenceConfig, Semantics, StrengthAssignment};
