//! Relation attribution: the Shapley value of every attack and support edge
//! in the cooperative game whose players are edges and whose payoff is the
//! topic argument's strength under the active edge subset.

mod approx;
mod exact;

use std::fmt;

use serde::{Deserialize, Serialize};

pub(crate) use approx::EdgeSampler;
pub use approx::{rae_approx, rae_approx_with, MonteCarloOptions};
pub use exact::{rae_exact, rae_exact_with, shapley_weights, ExactOptions};
pub(crate) use exact::{shapley_from_values, subset_values};

use crate::error::{Error, Result};
use crate::model::{ArgumentId, Edge, EdgeId, EdgeSubset, Qbaf};
use crate::semantics::{evaluate, ConvergenceConfig, Evaluator, Semantics};

/// Neutrality band applied to exact attributions.
pub const EXACT_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contribution {
    Positive,
    Negative,
    Neutral,
}

impl fmt::Display for Contribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Contribution::Positive => "positive",
            Contribution::Negative => "negative",
            Contribution::Neutral => "neutral",
        })
    }
}

pub fn classify_contribution(phi: f64, epsilon: f64) -> Contribution {
    if phi > epsilon {
        Contribution::Positive
    } else if phi < -epsilon {
        Contribution::Negative
    } else {
        Contribution::Neutral
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttribution {
    pub edge: Edge,
    pub phi: f64,
    /// Standard error of a Monte Carlo estimate; zero for exact values.
    pub std_error: f64,
    /// Samples dropped because a restricted evaluation did not converge.
    pub failed_samples: usize,
}

/// Attribution of every edge of a framework towards one topic argument.
/// Entries follow the framework's edge order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionMap {
    pub topic: ArgumentId,
    pub semantics: Semantics,
    pub method: Method,
    pub entries: Vec<EdgeAttribution>,
}

impl AttributionMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn phi(&self, id: EdgeId) -> f64 {
        self.entries[id.0].phi
    }

    pub fn get(&self, edge: &Edge) -> Option<f64> {
        self.entries.iter().find(|e| &e.edge == edge).map(|e| e.phi)
    }

    /// Attribution of the edge from `source` to `target`, whatever its polarity.
    pub fn between(&self, source: &str, target: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.edge.source.as_str() == source && e.edge.target.as_str() == target)
            .map(|e| e.phi)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.phi).collect()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.phi).sum()
    }

    /// Neutrality band for one entry: a fixed 1e-9 for exact values, twice
    /// the standard error for estimates.
    pub fn default_epsilon(&self, id: EdgeId) -> f64 {
        match self.method {
            Method::Exact => EXACT_EPSILON,
            Method::MonteCarlo { .. } => 2.0 * self.entries[id.0].std_error,
        }
    }

    pub fn contribution(&self, id: EdgeId, epsilon: Option<f64>) -> Contribution {
        let eps = epsilon.unwrap_or_else(|| self.default_epsilon(id));
        classify_contribution(self.entries[id.0].phi, eps)
    }

    pub fn failed_samples(&self) -> usize {
        self.entries.iter().map(|e| e.failed_samples).sum()
    }

    /// Checks that this attribution was computed for `q` and `topic`.
    pub fn check_matches(&self, q: &Qbaf, topic: &str) -> Result<()> {
        if self.topic.as_str() != topic {
            return Err(Error::AttributionMismatch(format!(
                "attribution explains `{}`, not `{topic}`",
                self.topic
            )));
        }
        if self.entries.len() != q.num_edges()
            || self
                .entries
                .iter()
                .zip(q.edges())
                .any(|(a, e)| &a.edge != e)
        {
            return Err(Error::AttributionMismatch("edge lists differ".to_string()));
        }
        Ok(())
    }
}

/// Change in the topic's strength when `edge` joins `subset`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSample {
    pub subset: EdgeSubset,
    pub delta: f64,
}

/// Evaluates one marginal contribution by materialising both restricted
/// frameworks.
pub fn marginal_contribution(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    subset: &EdgeSubset,
    edge: EdgeId,
    config: &ConvergenceConfig,
) -> Result<MarginalSample> {
    q.index_of(topic)?;
    if edge.0 >= q.num_edges() {
        return Err(Error::InvalidSubset {
            index: edge.0,
            len: q.num_edges(),
        });
    }
    let mut with = subset.clone();
    with.insert(edge);
    let without = subset_strength(q, semantics, topic, subset, config)?;
    let with = subset_strength(q, semantics, topic, &with, config)?;
    Ok(MarginalSample {
        subset: subset.clone(),
        delta: with - without,
    })
}

/// Strength of `topic` in `q` restricted to `subset`.
pub fn subset_strength(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    subset: &EdgeSubset,
    config: &ConvergenceConfig,
) -> Result<f64> {
    let restricted = q.restrict(subset)?;
    let s = evaluate(&restricted, semantics, config);
    if !s.converged {
        return Err(Error::NotWellDefined {
            subset: subset.iter().map(|id| q.edge(id).clone()).collect(),
            residual: s.residual,
            iterations: s.iterations,
        });
    }
    Ok(s[topic])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub tau: f64,
    pub sigma: f64,
    pub sum_phi: f64,
    pub residual: f64,
}

/// Compares the topic's strength shift against the sum of attributions.
pub fn efficiency_decomposition(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    attribution: &AttributionMap,
    config: &ConvergenceConfig,
) -> Result<EfficiencyReport> {
    attribution.check_matches(q, topic)?;
    if attribution.semantics != semantics {
        return Err(Error::AttributionMismatch(format!(
            "attribution uses {}, not {semantics}",
            attribution.semantics
        )));
    }
    let tau = q.base_score(topic).expect("topic checked");
    let sigma = subset_strength(q, semantics, topic, &q.full_subset(), config)?;
    let sum_phi = attribution.sum();
    Ok(EfficiencyReport {
        tau,
        sigma,
        sum_phi,
        residual: (sigma - tau - sum_phi).abs(),
    })
}

/// The coalitional game of one framework, semantics and topic.
pub(crate) struct TopicGame<'q> {
    pub q: &'q Qbaf,
    pub semantics: Semantics,
    pub topic: usize,
    pub config: ConvergenceConfig,
    evaluator: Evaluator,
}

impl<'q> TopicGame<'q> {
    pub fn new(
        q: &'q Qbaf,
        semantics: Semantics,
        topic: &str,
        config: &ConvergenceConfig,
    ) -> Result<Self> {
        let topic = q.index_of(topic)?;
        Ok(Self {
            q,
            semantics,
            topic,
            config: *config,
            evaluator: Evaluator::for_topic(q, topic),
        })
    }

    pub fn num_edges(&self) -> usize {
        self.q.num_edges()
    }

    /// Topic strength with the flagged edges active, or the residual and
    /// sweep count when the iteration does not settle.
    pub fn value(&self, mask: &[bool]) -> std::result::Result<f64, (f64, usize)> {
        let run = self
            .evaluator
            .evaluate(self.semantics, Some(mask), &self.config);
        if run.converged {
            Ok(run.values[self.topic])
        } else {
            Err((run.residual, run.iterations))
        }
    }

    /// An edge whose target cannot reach the topic never changes its strength.
    pub fn is_dummy(&self, edge: usize) -> bool {
        !self.evaluator.in_scope(self.q.links()[edge].target)
    }

    pub fn topic_id(&self) -> ArgumentId {
        self.q.id_at(self.topic).clone()
    }

    pub fn edge_list(&self, mask: &[bool]) -> Vec<Edge> {
        mask.iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| self.q.edges()[i].clone())
            .collect()
    }
}
