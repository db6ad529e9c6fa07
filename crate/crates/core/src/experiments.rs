//! Random framework generation, Monte Carlo convergence traces and runtime
//! measurements.

use std::io::Write;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attribution::{EdgeSampler, TopicGame};
use crate::error::{Error, Result};
use crate::model::{Edge, Polarity, Qbaf};
use crate::semantics::{is_acyclic, ConvergenceConfig, Semantics};

const CYCLIC_RETRIES: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BaseScoreDistribution {
    Uniform01,
    Constant(f64),
}

/// Parameters of a random framework.
///
/// Arguments are named `"0"`, `"1"`, ... In acyclic mode every edge points
/// from a higher to a lower number, so `"0"` is always a sink.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub num_arguments: usize,
    pub num_edges: usize,
    #[serde(default)]
    pub cyclic: bool,
    #[serde(default = "default_support_fraction")]
    pub support_fraction: f64,
    #[serde(default = "default_distribution")]
    pub base_scores: BaseScoreDistribution,
    #[serde(default)]
    pub seed: u64,
}

fn default_support_fraction() -> f64 {
    0.5
}

fn default_distribution() -> BaseScoreDistribution {
    BaseScoreDistribution::Uniform01
}

impl GenSpec {
    pub fn new(num_arguments: usize, num_edges: usize, cyclic: bool, seed: u64) -> Self {
        Self {
            num_arguments,
            num_edges,
            cyclic,
            support_fraction: default_support_fraction(),
            base_scores: default_distribution(),
            seed,
        }
    }

    /// Largest feasible edge count: every unordered pair once when acyclic,
    /// every ordered pair including self-edges otherwise.
    pub fn max_edges(&self) -> usize {
        let n = self.num_arguments;
        if self.cyclic {
            n * n
        } else {
            n * n.saturating_sub(1) / 2
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.support_fraction) {
            return Err(Error::InfeasibleSpec(format!(
                "support fraction {} is outside [0, 1]",
                self.support_fraction
            )));
        }
        if let BaseScoreDistribution::Constant(c) = self.base_scores {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InfeasibleSpec(format!(
                    "constant base score {c} is outside [0, 1]"
                )));
            }
        }
        if self.num_edges > self.max_edges() {
            return Err(Error::InfeasibleSpec(format!(
                "{} edges requested but at most {} fit {} arguments{}",
                self.num_edges,
                self.max_edges(),
                self.num_arguments,
                if self.cyclic { "" } else { " without a cycle" }
            )));
        }
        if self.cyclic && self.num_edges == 0 {
            return Err(Error::InfeasibleSpec(
                "a cyclic framework needs at least one edge".into(),
            ));
        }
        Ok(())
    }
}

/// Draws a framework with exactly the requested argument and edge counts.
/// The same spec always yields the same framework.
pub fn generate(spec: &GenSpec) -> Result<Qbaf> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.num_arguments;
    for _ in 0..CYCLIC_RETRIES {
        let mut picked = index::sample(&mut rng, spec.max_edges(), spec.num_edges).into_vec();
        picked.sort_unstable();
        let pairs: Vec<(usize, usize)> = picked
            .into_iter()
            .map(|p| {
                if spec.cyclic {
                    (p / n, p % n)
                } else {
                    lower_pair(p)
                }
            })
            .collect();

        let mut builder = Qbaf::builder();
        for i in 0..n {
            let score = match spec.base_scores {
                BaseScoreDistribution::Uniform01 => rng.random::<f64>(),
                BaseScoreDistribution::Constant(c) => c,
            };
            builder = builder.argument(i.to_string(), score);
        }
        for (source, target) in pairs {
            let polarity = if rng.random_bool(spec.support_fraction) {
                Polarity::Support
            } else {
                Polarity::Attack
            };
            builder = builder.edge(Edge {
                source: source.to_string().into(),
                target: target.to_string().into(),
                polarity,
            });
        }
        let q = builder.build()?;
        if !spec.cyclic || !is_acyclic(&q) {
            return Ok(q);
        }
    }
    Err(Error::InfeasibleSpec(format!(
        "no cyclic framework found in {CYCLIC_RETRIES} draws"
    )))
}

/// Maps `0..n(n-1)/2` onto pairs `(source, target)` with `source > target`.
fn lower_pair(p: usize) -> (usize, usize) {
    // row s holds s pairs, starting at s(s-1)/2
    let mut s = ((((8 * p + 1) as f64).sqrt() + 1.0) / 2.0) as usize;
    while s * (s - 1) / 2 > p {
        s -= 1;
    }
    while (s + 1) * s / 2 <= p {
        s += 1;
    }
    (s, p - s * (s - 1) / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeTrace {
    pub edge: Edge,
    /// `(samples drawn, running estimate)` at every checkpoint.
    pub checkpoints: Vec<(usize, f64)>,
    /// Absolute change between consecutive checkpoints.
    pub differences: Vec<f64>,
    pub failed_samples: usize,
}

impl EdgeTrace {
    /// First checkpoint after which every successive difference stays below
    /// `threshold`.
    pub fn settled_at(&self, threshold: f64) -> Option<usize> {
        let last_big = self.differences.iter().rposition(|&d| d >= threshold);
        let idx = last_big.map_or(0, |i| i + 1);
        self.checkpoints.get(idx).map(|c| c.0)
    }

    pub fn final_estimate(&self) -> Option<f64> {
        self.checkpoints.last().map(|c| c.1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub stride: usize,
    pub edges: Vec<EdgeTrace>,
}

impl ConvergenceTrace {
    /// Sample count by which every edge has settled, if all of them have.
    pub fn settled_at(&self, threshold: f64) -> Option<usize> {
        self.edges
            .iter()
            .map(|e| e.settled_at(threshold))
            .try_fold(0, |acc, s| s.map(|s| acc.max(s)))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            edge: String,
            source: &'a str,
            target: &'a str,
            samples: usize,
            estimate: f64,
            difference: Option<f64>,
        }
        let mut w = csv::Writer::from_writer(out);
        for t in &self.edges {
            for (i, &(samples, estimate)) in t.checkpoints.iter().enumerate() {
                w.serialize(Row {
                    edge: t.edge.to_string(),
                    source: t.edge.source.as_str(),
                    target: t.edge.target.as_str(),
                    samples,
                    estimate,
                    difference: i.checked_sub(1).map(|j| t.differences[j]),
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Records running Monte Carlo estimates every `stride` samples.
///
/// Uses the same per-edge random streams as the estimator, so the final
/// checkpoint equals `rae_approx` with `max_samples` samples.
pub fn trace_convergence(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    max_samples: usize,
    stride: usize,
    seed: u64,
    config: &ConvergenceConfig,
) -> Result<ConvergenceTrace> {
    if max_samples == 0 {
        return Err(Error::NoSamples);
    }
    if stride == 0 {
        return Err(Error::InfeasibleSpec("stride must be at least 1".into()));
    }
    let game = TopicGame::new(q, semantics, topic, config)?;
    let edges: Vec<EdgeTrace> = (0..q.num_edges())
        .into_par_iter()
        .map(|edge| {
            let mut sampler = EdgeSampler::new(&game, edge, seed);
            let (mut sum, mut ok, mut failed) = (0.0, 0usize, 0usize);
            let mut checkpoints = Vec::with_capacity(max_samples / stride + 1);
            for drawn in 1..=max_samples {
                match sampler.draw() {
                    Some(d) => {
                        sum += d;
                        ok += 1;
                    }
                    None => failed += 1,
                }
                if (drawn % stride == 0 || drawn == max_samples) && ok > 0 {
                    checkpoints.push((drawn, sum / ok as f64));
                }
            }
            let differences = checkpoints
                .windows(2)
                .map(|w| (w[1].1 - w[0].1).abs())
                .collect();
            EdgeTrace {
                edge: q.edges()[edge].clone(),
                checkpoints,
                differences,
                failed_samples: failed,
            }
        })
        .collect();

    let failed: usize = edges.iter().map(|e| e.failed_samples).sum();
    let total = max_samples * q.num_edges();
    if failed * 100 > total {
        return Err(Error::TooManyFailedSamples {
            failed,
            total,
            allowed: 0.01,
        });
    }
    Ok(ConvergenceTrace { stride, edges })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub num_arguments: usize,
    pub num_edges: usize,
    pub cyclic: bool,
    pub seed: u64,
    pub repetitions: usize,
    /// Mean wall-clock milliseconds per marginal contribution (two
    /// restricted evaluations of the topic).
    pub mean_ms: f64,
    /// Draws whose evaluations did not converge; they are still timed.
    pub failed: usize,
}

/// Times marginal-contribution draws on one generated framework per spec,
/// with argument `"0"` as the topic.
///
/// Runs on the calling thread only so that measurements do not compete.
pub fn benchmark_runtime(
    specs: &[GenSpec],
    semantics: Semantics,
    repetitions: usize,
    config: &ConvergenceConfig,
) -> Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let q = generate(spec)?;
        if q.num_arguments() == 0 {
            return Err(Error::InfeasibleSpec(
                "benchmark needs at least one argument".into(),
            ));
        }
        let game = TopicGame::new(&q, semantics, "0", config)?;
        let mut samplers: Vec<EdgeSampler> = (0..q.num_edges())
            .map(|e| EdgeSampler::new(&game, e, spec.seed))
            .collect();
        let mut failed = 0;
        let mut elapsed = 0.0;
        for rep in 0..repetitions {
            let start = Instant::now();
            let outcome = match samplers.len() {
                0 => game.value(&[]).ok(),
                m => samplers[rep % m].draw(),
            };
            elapsed += start.elapsed().as_secs_f64();
            if outcome.is_none() {
                failed += 1;
            }
        }
        rows.push(BenchRow {
            num_arguments: spec.num_arguments,
            num_edges: spec.num_edges,
            cyclic: spec.cyclic,
            seed: spec.seed,
            repetitions,
            mean_ms: elapsed * 1e3 / repetitions as f64,
            failed,
        });
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// A benchmark batch as read from a plan file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    pub semantics: Semantics,
    pub repetitions: usize,
    pub specs: Vec<GenSpec>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::{rae_approx, rae_exact};

    #[test]
    fn lower_pair_enumerates_all() {
        let n = 9;
        let pairs: Vec<_> = (0..n * (n - 1) / 2).map(lower_pair).collect();
        let mut expected = Vec::new();
        for s in 1..n {
            for t in 0..s {
                expected.push((s, t));
            }
        }
        assert_eq!(pairs, expected);
    }

    #[test]
    fn acyclic_counts_and_determinism() {
        let spec = GenSpec::new(15, 25, false, 11);
        let q = generate(&spec).unwrap();
        assert_eq!((q.num_arguments(), q.num_edges()), (15, 25));
        assert!(is_acyclic(&q));
        assert!(q.edges().iter().all(|e| {
            e.source.as_str().parse::<usize>().unwrap()
                > e.target.as_str().parse::<usize>().unwrap()
        }));
        assert_eq!(generate(&spec).unwrap(), q);
        assert_ne!(generate(&GenSpec { seed: 12, ..spec }).unwrap(), q);
    }

    #[test]
    fn complete_dag_fits() {
        let q = generate(&GenSpec::new(5, 10, false, 0)).unwrap();
        assert_eq!(q.num_edges(), 10);
        assert!(matches!(
            generate(&GenSpec::new(5, 25, false, 0)),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(matches!(
            generate(&GenSpec::new(5, 26, true, 0)),
            Err(Error::InfeasibleSpec(_))
        ));
    }

    #[test]
    fn cyclic_mode_is_cyclic() {
        for seed in 0..20 {
            let q = generate(&GenSpec::new(6, 4, true, seed)).unwrap();
            assert!(!is_acyclic(&q));
            assert_eq!(q.num_edges(), 4);
        }
    }

    #[test]
    fn support_fraction_and_constant_scores() {
        let spec = GenSpec {
            support_fraction: 1.0,
            base_scores: BaseScoreDistribution::Constant(0.5),
            ..GenSpec::new(10, 30, false, 3)
        };
        let q = generate(&spec).unwrap();
        assert!(q.edges().iter().all(|e| e.polarity == Polarity::Support));
        assert!(q.arguments().all(|(_, a)| a.base_score == 0.5));
        let bad = GenSpec {
            support_fraction: 1.5,
            ..spec
        };
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn trace_ends_at_estimator_value() {
        let q = generate(&GenSpec::new(6, 8, false, 5)).unwrap();
        let cfg = ConvergenceConfig::default();
        let trace = trace_convergence(&q, Semantics::DfQuad, "0", 95, 10, 9, &cfg).unwrap();
        let approx = rae_approx(&q, Semantics::DfQuad, "0", 95, 9, &cfg).unwrap();
        for (t, a) in trace.edges.iter().zip(&approx.entries) {
            assert_eq!(t.final_estimate(), Some(a.phi));
            assert_eq!(t.checkpoints.len(), 10);
            assert_eq!(t.checkpoints.last().unwrap().0, 95);
            assert!(t.checkpoints.windows(2).all(|w| w[0].0 < w[1].0));
        }
        let again = trace_convergence(&q, Semantics::DfQuad, "0", 95, 10, 9, &cfg).unwrap();
        assert_eq!(trace, again);
    }

    #[test]
    fn dummy_edge_trace_is_flat() {
        // edge 2 -> 1 cannot reach topic 0 when 1 has no outgoing edges
        let q = Qbaf::builder()
            .argument("0", 0.5)
            .argument("1", 0.5)
            .argument("2", 0.5)
            .support("2", "1")
            .attack("2", "0")
            .build()
            .unwrap();
        let trace = trace_convergence(
            &q,
            Semantics::QuadraticEnergy,
            "0",
            50,
            5,
            1,
            &ConvergenceConfig::default(),
        )
        .unwrap();
        assert!(trace.edges[0].checkpoints.iter().all(|c| c.1 == 0.0));
        assert_eq!(trace.edges[0].settled_at(1e-12), Some(5));
    }

    #[test]
    fn trace_converges_towards_exact() {
        let q = generate(&GenSpec::new(8, 10, false, 21)).unwrap();
        let cfg = ConvergenceConfig::default();
        let exact = rae_exact(&q, Semantics::DfQuad, "0", &cfg).unwrap();
        let trace = trace_convergence(&q, Semantics::DfQuad, "0", 5000, 100, 2, &cfg).unwrap();
        for (t, e) in trace.edges.iter().zip(&exact.entries) {
            assert!((t.final_estimate().unwrap() - e.phi).abs() < 0.02);
        }
    }

    #[test]
    fn settle_point() {
        let t = EdgeTrace {
            edge: Edge::attack("a", "b"),
            checkpoints: vec![(10, 0.5), (20, 0.3), (30, 0.31), (40, 0.305)],
            differences: vec![0.2, 0.01, 0.005],
            failed_samples: 0,
        };
        assert_eq!(t.settled_at(0.05), Some(20));
        assert_eq!(t.settled_at(0.008), Some(30));
        assert_eq!(t.settled_at(0.001), Some(40));
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let q = generate(&GenSpec::new(4, 3, false, 1)).unwrap();
        let trace = trace_convergence(
            &q,
            Semantics::DfQuad,
            "0",
            20,
            10,
            1,
            &ConvergenceConfig::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("edge,source,target,samples,estimate,difference\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 2);
    }

    #[test]
    fn bench_rows() {
        let cfg = ConvergenceConfig::default();
        let specs = [GenSpec::new(8, 10, false, 1), GenSpec::new(8, 10, true, 1)];
        assert!(
            benchmark_runtime(&specs, Semantics::QuadraticEnergy, 0, &cfg)
                .unwrap()
                .is_empty()
        );
        let rows = benchmark_runtime(&specs, Semantics::QuadraticEnergy, 20, &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.mean_ms >= 0.0 && r.repetitions == 20));
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("num_arguments,num_edges,cyclic,seed,repetitions,mean_ms,failed\n")
        );
    }

    #[test]
    fn plan_parses_with_defaults() {
        let plan: BenchPlan = serde_json::from_str(
            r#"{"semantics": "qe", "repetitions": 5,
                "specs": [{"num_arguments": 4, "num_edges": 3}]}"#,
        )
        .unwrap();
        assert_eq!(plan.specs[0], GenSpec::new(4, 3, false, 0));
    }
}
