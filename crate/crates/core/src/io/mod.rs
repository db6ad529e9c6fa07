pub mod datasets;
pub mod document;
pub mod dot;

pub use document::{parse_qbaf, serialize_qbaf, QbafDocument};
pub use dot::export_dot;

use crate::attribution::AttributionMap;
use crate::error::{Error, Result};
use crate::graph::PathToTopic;

/// Sum of the attributions of the edges along a path.
pub fn path_contribution(attribution: &AttributionMap, path: &PathToTopic) -> Result<f64> {
    path.edges
        .iter()
        .map(|id| {
            attribution.entries.get(id.0).map(|e| e.phi).ok_or_else(|| {
                Error::AttributionMismatch(format!("path edge #{} has no attribution", id.0))
            })
        })
        .sum()
}
