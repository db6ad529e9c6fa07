use rayon::prelude::*;

use super::{AttributionMap, EdgeAttribution, Method, TopicGame};
use crate::error::{Error, Result};
use crate::model::Qbaf;
use crate::semantics::{ConvergenceConfig, Semantics};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Largest edge count enumerated; all 2^n subset strengths are held in
    /// memory.
    pub max_edges: usize,
}

impl ExactOptions {
    pub const DEFAULT_MAX_EDGES: usize = 25;
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_edges: Self::DEFAULT_MAX_EDGES,
        }
    }
}

/// Weight of a coalition of size `k` in an `n`-player game,
/// `k! (n-k-1)! / n!`, for `k = 0..n`.
///
/// Built from `w(0) = 1/n` and `w(k) = w(k-1) * k / (n-k)`, so no factorial
/// is ever formed.
pub fn shapley_weights(n: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(n);
    if n == 0 {
        return weights;
    }
    let mut w = 1.0 / n as f64;
    weights.push(w);
    for k in 1..n {
        w *= k as f64 / (n - k) as f64;
        weights.push(w);
    }
    weights
}

pub fn rae_exact(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    config: &ConvergenceConfig,
) -> Result<AttributionMap> {
    rae_exact_with(q, semantics, topic, config, &ExactOptions::default())
}

/// Exact attributions by enumerating every edge subset once.
///
/// The topic strength of each subset is computed a single time and shared by
/// all edges, since the subset with an edge added is itself a subset.
pub fn rae_exact_with(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    config: &ConvergenceConfig,
    options: &ExactOptions,
) -> Result<AttributionMap> {
    let game = TopicGame::new(q, semantics, topic, config)?;
    let n = q.num_edges();
    if n > options.max_edges {
        return Err(Error::ExactCapExceeded {
            edges: n,
            cap: options.max_edges,
        });
    }
    if n >= usize::BITS as usize - 1 {
        return Err(Error::ExactCapExceeded {
            edges: n,
            cap: usize::BITS as usize - 2,
        });
    }

    let values = subset_values(&game)?;
    let phis = shapley_from_values(&values, n);

    Ok(AttributionMap {
        topic: game.topic_id(),
        semantics,
        method: Method::Exact,
        entries: q
            .edges()
            .iter()
            .zip(phis)
            .map(|(edge, phi)| EdgeAttribution {
                edge: edge.clone(),
                phi,
                std_error: 0.0,
                failed_samples: 0,
            })
            .collect(),
    })
}

/// Topic strength for every edge subset, indexed by bit mask over edge
/// indices. Fails on the lowest-numbered subset whose evaluation diverges.
pub(crate) fn subset_values(game: &TopicGame) -> Result<Vec<f64>> {
    let n = game.num_edges();
    let values: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |mask, bits| {
                for (i, m) in mask.iter_mut().enumerate() {
                    *m = bits >> i & 1 == 1;
                }
                game.value(mask).unwrap_or(f64::NAN)
            },
        )
        .collect();

    if let Some(bad) = values.iter().position(|v| v.is_nan()) {
        let mask: Vec<bool> = (0..n).map(|i| bad >> i & 1 == 1).collect();
        let (residual, iterations) = game.value(&mask).expect_err("recorded as diverging");
        return Err(Error::NotWellDefined {
            subset: game.edge_list(&mask),
            residual,
            iterations,
        });
    }
    Ok(values)
}

/// Shapley value of every edge from a table built by [`subset_values`].
/// Each sum runs in ascending mask order, so results are reproducible.
pub(crate) fn shapley_from_values(values: &[f64], n: usize) -> Vec<f64> {
    let weights = shapley_weights(n);
    (0..n)
        .into_par_iter()
        .map(|r| {
            let bit = 1usize << r;
            let mut phi = 0.0;
            for subset in (0..1usize << n).filter(|s| s & bit == 0) {
                let k = subset.count_ones() as usize;
                phi += weights[k] * (values[subset | bit] - values[subset]);
            }
            phi
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{self, fig1_edge, fig2_edge, llm_edge};

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=25 {
            let w = shapley_weights(n);
            let total: f64 = (0..n).map(|k| binomial(n - 1, k) * w[k]).sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
        }
        assert_eq!(shapley_weights(1), vec![1.0]);
        assert_eq!(shapley_weights(3), vec![1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0]);
    }

    #[test]
    fn fig2_values() {
        let q = datasets::fig2();
        let map = rae_exact(
            &q,
            Semantics::DfQuad,
            "alpha",
            &ConvergenceConfig::default(),
        )
        .unwrap();
        let phi = |r| map.get(&fig2_edge(r)).unwrap();
        assert!((phi(1) - 0.16875).abs() < 1e-9);
        assert!((phi(2) - 0.16875).abs() < 1e-9);
        assert!((phi(3) + 0.0318).abs() < 5e-4);
        assert!((phi(4) + 0.0318).abs() < 5e-4);
        assert!((phi(5) - 0.0307).abs() < 5e-4);
        assert!((map.sum() - 0.3046875).abs() < 1e-9);
    }

    #[test]
    fn fig2_topic_beta_has_dummy_edges() {
        let q = datasets::fig2();
        let map = rae_exact(&q, Semantics::DfQuad, "beta", &ConvergenceConfig::default()).unwrap();
        assert_eq!(map.get(&fig2_edge(1)), Some(0.0));
        assert_eq!(map.get(&fig2_edge(2)), Some(0.0));
        assert_eq!(map.get(&fig2_edge(4)), Some(0.0));
    }

    #[test]
    fn fig1_values() {
        let q = datasets::fig1();
        let map = rae_exact(
            &q,
            Semantics::DfQuad,
            "alpha",
            &ConvergenceConfig::default(),
        )
        .unwrap();
        let phi = |r| map.get(&fig1_edge(r)).unwrap();
        let expected = [
            (1, 0.1981125),
            (2, 0.2471125),
            (3, 0.0135),
            (4, 0.016),
            (5, -0.034),
            (6, -0.0118875),
            (7, 0.0221125),
        ];
        for (r, v) in expected {
            assert!((phi(r) - v).abs() < 1e-9, "r{r}: {}", phi(r));
        }
    }

    #[test]
    fn llm_values() {
        let q = datasets::llm();
        let map = rae_exact(
            &q,
            Semantics::QuadraticEnergy,
            "alpha",
            &ConvergenceConfig::default(),
        )
        .unwrap();
        let phi = |r| map.get(&llm_edge(r)).unwrap();
        assert!((phi(1) - 0.1134).abs() < 1e-3);
        assert!((phi(3) - 0.008389).abs() < 1e-4);
        assert!((phi(5) + 0.1078).abs() < 1e-3);
        assert!((phi(2) + phi(4) - 0.0884).abs() < 1e-3);
        assert!((map.sum() - 0.10).abs() < 5e-3);
    }

    #[test]
    fn cap_is_enforced() {
        let q = datasets::fraud();
        let err = rae_exact(&q, Semantics::DfQuad, "1", &ConvergenceConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::ExactCapExceeded { edges: 47, cap: 25 }
        ));
    }

    #[test]
    fn unknown_topic() {
        let err = rae_exact(
            &datasets::fig2(),
            Semantics::DfQuad,
            "omega",
            &ConvergenceConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownArgument(_)));
    }

    #[test]
    fn divergent_subset_is_named() {
        let q = Qbaf::builder()
            .argument("a", 1.0)
            .argument("b", 1.0)
            .argument("t", 0.5)
            .attack("a", "b")
            .attack("b", "a")
            .support("a", "t")
            .build()
            .unwrap();
        let cfg = ConvergenceConfig::new(1e-9, 100).unwrap();
        let err = rae_exact(&q, Semantics::DfQuad, "t", &cfg).unwrap_err();
        match err {
            Error::NotWellDefined { subset, .. } => assert_eq!(subset.len(), 2),
            other => panic!("unexpected {other}"),
        }
    }
}
