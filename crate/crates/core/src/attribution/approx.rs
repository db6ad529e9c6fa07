use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AttributionMap, EdgeAttribution, Method, TopicGame};
use crate::error::{Error, Result};
use crate::model::Qbaf;
use crate::semantics::{ConvergenceConfig, Semantics};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloOptions {
    /// Permutations drawn per edge.
    pub samples: usize,
    pub seed: u64,
    /// Fraction of non-converging samples tolerated before giving up.
    pub max_failure_fraction: f64,
}

impl MonteCarloOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            max_failure_fraction: 0.01,
        }
    }
}

/// Draws marginal contributions of one edge over random edge orderings.
///
/// Each edge owns an independent ChaCha stream derived from the seed and the
/// edge index, so estimates do not depend on thread scheduling.
pub(crate) struct EdgeSampler<'g, 'q> {
    game: &'g TopicGame<'q>,
    edge: usize,
    dummy: bool,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    mask: Vec<bool>,
}

impl<'g, 'q> EdgeSampler<'g, 'q> {
    pub fn new(game: &'g TopicGame<'q>, edge: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(edge as u64);
        let n = game.num_edges();
        Self {
            game,
            edge,
            dummy: game.is_dummy(edge),
            rng,
            order: (0..n).collect(),
            mask: vec![false; n],
        }
    }

    /// One marginal contribution, or `None` if either restricted framework
    /// fails to converge.
    pub fn draw(&mut self) -> Option<f64> {
        self.order.shuffle(&mut self.rng);
        if self.dummy {
            return Some(0.0);
        }
        self.mask.fill(false);
        for &e in &self.order {
            if e == self.edge {
                break;
            }
            self.mask[e] = true;
        }
        let without = self.game.value(&self.mask).ok()?;
        self.mask[self.edge] = true;
        let with = self.game.value(&self.mask).ok()?;
        Some(with - without)
    }
}

pub fn rae_approx(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    samples: usize,
    seed: u64,
    config: &ConvergenceConfig,
) -> Result<AttributionMap> {
    rae_approx_with(
        q,
        semantics,
        topic,
        config,
        &MonteCarloOptions::new(samples, seed),
    )
}

/// Monte Carlo attributions from random edge orderings.
///
/// Non-converging samples are skipped and counted. Each estimate divides by
/// the samples that succeeded; the run fails if more than the tolerated
/// fraction of all samples failed.
pub fn rae_approx_with(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    config: &ConvergenceConfig,
    options: &MonteCarloOptions,
) -> Result<AttributionMap> {
    let game = TopicGame::new(q, semantics, topic, config)?;
    let n = q.num_edges();
    if n > 0 && options.samples == 0 {
        return Err(Error::NoSamples);
    }

    let stats: Vec<(f64, f64, usize)> = (0..n)
        .into_par_iter()
        .map(|edge| {
            let mut sampler = EdgeSampler::new(&game, edge, options.seed);
            let (mut sum, mut sum_sq, mut failed) = (0.0, 0.0, 0);
            for _ in 0..options.samples {
                match sampler.draw() {
                    Some(d) => {
                        sum += d;
                        sum_sq += d * d;
                    }
                    None => failed += 1,
                }
            }
            let ok = (options.samples - failed) as f64;
            let mean = sum / ok;
            let se = if ok > 1.0 {
                let var = ((sum_sq - ok * mean * mean) / (ok - 1.0)).max(0.0);
                (var / ok).sqrt()
            } else {
                0.0
            };
            (mean, se, failed)
        })
        .collect();

    let failed: usize = stats.iter().map(|s| s.2).sum();
    let total = n * options.samples;
    let allowed = (options.max_failure_fraction * total as f64).floor() as usize;
    if failed > allowed {
        return Err(Error::TooManyFailedSamples {
            failed,
            total,
            allowed: options.max_failure_fraction,
        });
    }

    Ok(AttributionMap {
        topic: game.topic_id(),
        semantics,
        method: Method::MonteCarlo {
            samples: options.samples,
            seed: options.seed,
        },
        entries: q
            .edges()
            .iter()
            .zip(stats)
            .map(|(edge, (phi, std_error, failed_samples))| EdgeAttribution {
                edge: edge.clone(),
                phi,
                std_error,
                failed_samples,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::rae_exact;
    use crate::datasets::{self, fig2_edge};

    #[test]
    fn fig2_estimates_near_exact() {
        let q = datasets::fig2();
        let cfg = ConvergenceConfig::default();
        let exact = rae_exact(&q, Semantics::DfQuad, "alpha", &cfg).unwrap();
        let approx = rae_approx(&q, Semantics::DfQuad, "alpha", 4000, 7, &cfg).unwrap();
        for (e, a) in exact.entries.iter().zip(&approx.entries) {
            assert!(
                (e.phi - a.phi).abs() < 4.0 * a.std_error + 1e-12,
                "{}",
                e.edge
            );
        }
    }

    #[test]
    fn same_seed_same_estimates() {
        let q = datasets::fig1();
        let cfg = ConvergenceConfig::default();
        let a = rae_approx(&q, Semantics::DfQuad, "alpha", 200, 42, &cfg).unwrap();
        let b = rae_approx(&q, Semantics::DfQuad, "alpha", 200, 42, &cfg).unwrap();
        assert_eq!(a, b);
        let c = rae_approx(&q, Semantics::DfQuad, "alpha", 200, 43, &cfg).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn dummy_edges_estimate_zero() {
        let q = datasets::fig2();
        let map = rae_approx(
            &q,
            Semantics::DfQuad,
            "beta",
            50,
            1,
            &ConvergenceConfig::default(),
        )
        .unwrap();
        let r1 = q.edge_id(&fig2_edge(1)).unwrap();
        assert_eq!(map.phi(r1), 0.0);
        assert_eq!(map.entries[r1.0].std_error, 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        let err = rae_approx(
            &datasets::fig2(),
            Semantics::DfQuad,
            "alpha",
            0,
            1,
            &ConvergenceConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoSamples));
    }

    #[test]
    fn divergent_samples_abort() {
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
        let err = rae_approx(&q, Semantics::DfQuad, "t", 200, 3, &cfg).unwrap_err();
        assert!(matches!(err, Error::TooManyFailedSamples { .. }), "{err}");
    }
}
