//! Paths from edges to a topic argument, edge classification and the sign
//! of an edge's attribution predicted from path parity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attribution::classify_contribution;
use crate::error::{Error, Result};
use crate::model::{ArgumentId, Edge, EdgeId, Polarity, Qbaf};
use crate::semantics::is_acyclic;

/// Default bound on the number of simple paths enumerated per edge.
pub const DEFAULT_PATH_CAP: usize = 10_000;

/// Edge sequence starting with the explained edge and ending at an edge into
/// the topic. No argument repeats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathToTopic {
    pub edges: Vec<EdgeId>,
}

impl PathToTopic {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Attacks after the first edge.
    pub fn continuation_attacks(&self, q: &Qbaf) -> usize {
        self.edges
            .iter()
            .skip(1)
            .filter(|&&id| q.edge(id).is_attack())
            .count()
    }

    pub fn display(&self, q: &Qbaf) -> String {
        self.edges
            .iter()
            .map(|&id| q.edge(id).to_string())
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEnumeration {
    pub paths: Vec<PathToTopic>,
    /// The cap was reached before the search finished.
    pub truncated: bool,
}

pub fn paths_to_topic(q: &Qbaf, edge: EdgeId, topic: &str) -> Result<Vec<PathToTopic>> {
    Ok(paths_to_topic_with(q, edge, topic, DEFAULT_PATH_CAP)?.paths)
}

/// All simple paths from the edge's target to the topic, each prefixed by the
/// edge itself. An edge into the topic yields the single path `[edge]`.
pub fn paths_to_topic_with(
    q: &Qbaf,
    edge: EdgeId,
    topic: &str,
    cap: usize,
) -> Result<PathEnumeration> {
    let topic = q.index_of(topic)?;
    let link = *q.links().get(edge.0).ok_or(Error::InvalidSubset {
        index: edge.0,
        len: q.num_edges(),
    })?;

    let mut out_edges = vec![Vec::new(); q.num_arguments()];
    for (i, l) in q.links().iter().enumerate() {
        out_edges[l.source].push(i);
    }

    let mut search = Search {
        out_edges: &out_edges,
        targets: q.links().iter().map(|l| l.target).collect(),
        topic,
        cap,
        visited: vec![false; q.num_arguments()],
        stack: vec![edge.0],
        paths: Vec::new(),
        truncated: false,
    };
    if link.source != topic {
        search.visited[link.source] = true;
    }
    search.visit(link.target);
    Ok(PathEnumeration {
        paths: search.paths,
        truncated: search.truncated,
    })
}

struct Search<'a> {
    out_edges: &'a [Vec<usize>],
    targets: Vec<usize>,
    topic: usize,
    cap: usize,
    visited: Vec<bool>,
    stack: Vec<usize>,
    paths: Vec<PathToTopic>,
    truncated: bool,
}

impl Search<'_> {
    fn visit(&mut self, node: usize) {
        if self.truncated {
            return;
        }
        if node == self.topic {
            if self.paths.len() == self.cap {
                self.truncated = true;
            } else {
                self.paths.push(PathToTopic {
                    edges: self.stack.iter().map(|&i| EdgeId(i)).collect(),
                });
            }
            return;
        }
        if self.visited[node] {
            return;
        }
        self.visited[node] = true;
        for k in 0..self.out_edges[node].len() {
            let e = self.out_edges[node][k];
            self.stack.push(e);
            self.visit(self.targets[e]);
            self.stack.pop();
        }
        self.visited[node] = false;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EdgeClass {
    Direct,
    Indirect { lambda: usize },
    Multifold { path_count: usize, truncated: bool },
    Disconnected,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeClass::Direct => f.write_str("direct"),
            EdgeClass::Indirect { lambda } => write!(f, "indirect(lambda={lambda})"),
            EdgeClass::Multifold {
                path_count,
                truncated: false,
            } => write!(f, "multifold({path_count} paths)"),
            EdgeClass::Multifold { path_count, .. } => write!(f, "multifold(>={path_count} paths)"),
            EdgeClass::Disconnected => f.write_str("disconnected"),
        }
    }
}

pub fn classify_edge(q: &Qbaf, edge: EdgeId, topic: &str) -> Result<EdgeClass> {
    let topic_index = q.index_of(topic)?;
    if q.links()
        .get(edge.0)
        .is_some_and(|l| l.target == topic_index)
    {
        return Ok(EdgeClass::Direct);
    }
    let found = paths_to_topic_with(q, edge, topic, DEFAULT_PATH_CAP)?;
    Ok(match found.paths.len() {
        0 => EdgeClass::Disconnected,
        1 if !found.truncated => EdgeClass::Indirect {
            lambda: found.paths[0].continuation_attacks(q),
        },
        n => EdgeClass::Multifold {
            path_count: n,
            truncated: found.truncated,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPrediction {
    NonNegative,
    NonPositive,
    Unknown,
}

impl SignPrediction {
    /// Whether an attribution value is consistent with the prediction, with
    /// values inside `[-epsilon, epsilon]` counting as zero.
    pub fn agrees(self, phi: f64, epsilon: f64) -> bool {
        use crate::attribution::Contribution::*;
        match (self, classify_contribution(phi, epsilon)) {
            (SignPrediction::Unknown, _) => true,
            (SignPrediction::NonNegative, c) => c != Negative,
            (SignPrediction::NonPositive, c) => c != Positive,
        }
    }
}

impl fmt::Display for SignPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignPrediction::NonNegative => ">= 0",
            SignPrediction::NonPositive => "<= 0",
            SignPrediction::Unknown => "?",
        })
    }
}

/// Sign implied by the edge's class: the polarity for direct edges, polarity
/// flipped once per attack on the continuation path for indirect ones.
pub fn sign_for_class(polarity: Polarity, class: EdgeClass) -> SignPrediction {
    let negative = match class {
        EdgeClass::Direct => polarity == Polarity::Attack,
        EdgeClass::Indirect { lambda } => (polarity == Polarity::Attack) != (lambda % 2 == 1),
        EdgeClass::Multifold { .. } | EdgeClass::Disconnected => return SignPrediction::Unknown,
    };
    if negative {
        SignPrediction::NonPositive
    } else {
        SignPrediction::NonNegative
    }
}

pub fn predict_sign(q: &Qbaf, edge: EdgeId, topic: &str) -> Result<SignPrediction> {
    let class = classify_edge(q, edge, topic)?;
    Ok(sign_for_class(q.edge(edge).polarity, class))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub edge: Edge,
    pub class: EdgeClass,
    pub prediction: SignPrediction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub topic: ArgumentId,
    /// Set when the framework has a cycle. Sign predictions are then only
    /// heuristics, since they rely on monotonicity in acyclic frameworks.
    pub cyclic: bool,
    pub edges: Vec<EdgeReport>,
}

/// Classifies every edge of `q` with respect to `topic`, in edge order.
pub fn classify_all(q: &Qbaf, topic: &str) -> Result<Classification> {
    let topic_id = q.id_at(q.index_of(topic)?).clone();
    let edges = q
        .edge_ids()
        .map(|id| {
            let class = classify_edge(q, id, topic)?;
            Ok(EdgeReport {
                edge: q.edge(id).clone(),
                class,
                prediction: sign_for_class(q.edge(id).polarity, class),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Classification {
        topic: topic_id,
        cyclic: !is_acyclic(q),
        edges,
    })
}
