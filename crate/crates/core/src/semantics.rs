//! Gradual semantics: DF-QuAD, Quadratic Energy and Restricted Euler-based.
//!
//! Every semantics starts from the base scores and repeatedly recomputes each
//! argument's strength from its attackers and supporters. On acyclic
//! frameworks a single pass in topological order reaches the fixpoint; cyclic
//! frameworks are iterated with synchronous sweeps until the largest change
//! drops below the configured tolerance.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArgumentId, Polarity, Qbaf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Semantics {
    #[serde(rename = "dfquad")]
    DfQuad,
    #[serde(rename = "qe")]
    QuadraticEnergy,
    #[serde(rename = "reb")]
    RestrictedEuler,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [
        Semantics::DfQuad,
        Semantics::QuadraticEnergy,
        Semantics::RestrictedEuler,
    ];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Semantics::DfQuad => "dfquad",
            Semantics::QuadraticEnergy => "qe",
            Semantics::RestrictedEuler => "reb",
        }
    }

    /// Strength of an argument given its attackers' and supporters' strengths.
    pub fn aggregate(self, attackers: &[f64], supporters: &[f64], base: f64) -> f64 {
        let mut acc = Accumulator::default();
        for &s in attackers {
            acc.add(s, true);
        }
        for &s in supporters {
            acc.add(s, false);
        }
        acc.finish(self, base)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "dfquad" | "df" => Ok(Semantics::DfQuad),
            "qe" | "quadraticenergy" => Ok(Semantics::QuadraticEnergy),
            "reb" | "restrictedeuler" => Ok(Semantics::RestrictedEuler),
            _ => Err(format!(
                "unknown semantics `{s}` (expected dfquad, qe or reb)"
            )),
        }
    }
}

pub fn aggregate_df_quad(attackers: &[f64], supporters: &[f64], base: f64) -> f64 {
    Semantics::DfQuad.aggregate(attackers, supporters, base)
}

pub fn aggregate_qe(attackers: &[f64], supporters: &[f64], base: f64) -> f64 {
    Semantics::QuadraticEnergy.aggregate(attackers, supporters, base)
}

pub fn aggregate_reb(attackers: &[f64], supporters: &[f64], base: f64) -> f64 {
    Semantics::RestrictedEuler.aggregate(attackers, supporters, base)
}

/// Running aggregate of one argument's active incoming edges.
#[derive(Clone, Copy, Debug)]
struct Accumulator {
    count: usize,
    // products of (1 - strength), for DF-QuAD
    attack_product: f64,
    support_product: f64,
    // plain sums, for the energy-based semantics
    attack_sum: f64,
    support_sum: f64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Self {
            count: 0,
            attack_product: 1.0,
            support_product: 1.0,
            attack_sum: 0.0,
            support_sum: 0.0,
        }
    }
}

impl Accumulator {
    #[inline]
    fn add(&mut self, strength: f64, attack: bool) {
        self.count += 1;
        if attack {
            self.attack_product *= 1.0 - strength;
            self.attack_sum += strength;
        } else {
            self.support_product *= 1.0 - strength;
            self.support_sum += strength;
        }
    }

    #[inline]
    fn finish(&self, semantics: Semantics, base: f64) -> f64 {
        // no incoming edges: the base score is kept exactly
        if self.count == 0 {
            return base;
        }
        match semantics {
            Semantics::DfQuad => {
                let attack = 1.0 - self.attack_product;
                let support = 1.0 - self.support_product;
                if attack >= support {
                    base - base * (attack - support)
                } else {
                    base + (1.0 - base) * (support - attack)
                }
            }
            Semantics::QuadraticEnergy => {
                let energy = self.support_sum - self.attack_sum;
                let squared = energy * energy;
                let factor = squared / (1.0 + squared);
                if energy <= 0.0 {
                    base - base * factor
                } else {
                    base + (1.0 - base) * factor
                }
            }
            Semantics::RestrictedEuler => {
                let energy = self.support_sum - self.attack_sum;
                1.0 - (1.0 - base * base) / (1.0 + base * energy.exp())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    tolerance: f64,
    max_iterations: usize,
}

impl ConvergenceConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;
    pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidConvergenceConfig(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidConvergenceConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(Self {
            tolerance,
            max_iterations,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthAssignment {
    pub strengths: IndexMap<ArgumentId, f64>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl StrengthAssignment {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.strengths.get(id).copied()
    }
}

impl Index<&str> for StrengthAssignment {
    type Output = f64;

    fn index(&self, id: &str) -> &f64 {
        self.strengths
            .get(id)
            .unwrap_or_else(|| panic!("no strength for argument `{id}`"))
    }
}

/// Final strengths of every argument of `q`.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged == false`.
pub fn evaluate(q: &Qbaf, semantics: Semantics, config: &ConvergenceConfig) -> StrengthAssignment {
    let evaluator = Evaluator::new(q);
    let run = evaluator.evaluate(semantics, None, config);
    StrengthAssignment {
        strengths: q.argument_ids().cloned().zip(run.values).collect(),
        converged: run.converged,
        iterations: run.iterations,
        residual: run.residual,
    }
}

pub fn is_acyclic(q: &Qbaf) -> bool {
    topological_order(
        q.num_arguments(),
        q.links().iter().map(|l| (l.source, l.target)),
    )
    .is_some()
}

/// Kahn's algorithm; `None` when the graph has a cycle (self-loops included).
pub(crate) fn topological_order(
    n: usize,
    edges: impl Iterator<Item = (usize, usize)>,
) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, t) in edges {
        out[s].push(t);
        indegree[t] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        order.push(v);
        for &t in &out[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                queue.push(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[derive(Clone, Copy, Debug)]
struct InEdge {
    edge: u32,
    source: u32,
    attack: bool,
}

/// Outcome of one evaluation run, indexed like the framework's arguments.
#[derive(Clone, Debug)]
pub(crate) struct Run {
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

/// Compiled form of a framework that evaluates any edge subset without
/// rebuilding the framework.
#[derive(Clone, Debug)]
pub(crate) struct Evaluator {
    base: Vec<f64>,
    in_start: Vec<usize>,
    in_edges: Vec<InEdge>,
    /// Arguments that get updated, in topological order when acyclic.
    scope: Vec<usize>,
    in_scope: Vec<bool>,
    acyclic: bool,
}

impl Evaluator {
    pub fn new(q: &Qbaf) -> Self {
        let scope: Vec<usize> = (0..q.num_arguments()).collect();
        Self::with_scope(q, scope)
    }

    /// Evaluator that only updates `topic` and the arguments with a directed
    /// path to it; every other strength stays at its base score.
    pub fn for_topic(q: &Qbaf, topic: usize) -> Self {
        let n = q.num_arguments();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for l in q.links() {
            preds[l.target].push(l.source);
        }
        let mut keep = vec![false; n];
        keep[topic] = true;
        let mut stack = vec![topic];
        while let Some(v) = stack.pop() {
            for &p in &preds[v] {
                if !keep[p] {
                    keep[p] = true;
                    stack.push(p);
                }
            }
        }
        let scope = (0..n).filter(|&v| keep[v]).collect();
        Self::with_scope(q, scope)
    }

    fn with_scope(q: &Qbaf, scope: Vec<usize>) -> Self {
        let n = q.num_arguments();
        let mut incoming: Vec<Vec<InEdge>> = vec![Vec::new(); n];
        for (i, l) in q.links().iter().enumerate() {
            incoming[l.target].push(InEdge {
                edge: i as u32,
                source: l.source as u32,
                attack: l.polarity == Polarity::Attack,
            });
        }
        let mut in_start = Vec::with_capacity(n + 1);
        let mut in_edges = Vec::with_capacity(q.num_edges());
        for list in incoming {
            in_start.push(in_edges.len());
            in_edges.extend(list);
        }
        in_start.push(in_edges.len());

        let mut in_scope = vec![false; n];
        for &v in &scope {
            in_scope[v] = true;
        }
        let order = topological_order(n, q.links().iter().map(|l| (l.source, l.target)));
        let acyclic = order.is_some();
        let scope = match order {
            Some(order) => order.into_iter().filter(|&v| in_scope[v]).collect(),
            None => scope,
        };
        Self {
            base: q.base_scores(),
            in_start,
            in_edges,
            scope,
            in_scope,
            acyclic,
        }
    }

    /// Whether `argument` is updated by this evaluator.
    pub fn in_scope(&self, argument: usize) -> bool {
        self.in_scope[argument]
    }

    #[inline]
    fn update(&self, semantics: Semantics, v: usize, values: &[f64], mask: Option<&[bool]>) -> f64 {
        let mut acc = Accumulator::default();
        for e in &self.in_edges[self.in_start[v]..self.in_start[v + 1]] {
            if mask.is_none_or(|m| m[e.edge as usize]) {
                acc.add(values[e.source as usize], e.attack);
            }
        }
        acc.finish(semantics, self.base[v])
    }

    /// Strengths with only the edges flagged in `mask` active (all edges when
    /// `mask` is `None`).
    pub fn evaluate(
        &self,
        semantics: Semantics,
        mask: Option<&[bool]>,
        config: &ConvergenceConfig,
    ) -> Run {
        if self.acyclic {
            let mut values = self.base.clone();
            for &v in &self.scope {
                values[v] = self.update(semantics, v, &values, mask);
            }
            return Run {
                values,
                converged: true,
                iterations: 1,
                residual: 0.0,
            };
        }

        let mut current = self.base.clone();
        let mut next = self.base.clone();
        let mut residual = f64::INFINITY;
        for iteration in 1..=config.max_iterations() {
            residual = 0.0;
            for &v in &self.scope {
                let value = self.update(semantics, v, &current, mask);
                residual = f64::max(residual, (value - current[v]).abs());
                next[v] = value;
            }
            std::mem::swap(&mut current, &mut next);
            if residual <= config.tolerance() {
                return Run {
                    values: current,
                    converged: true,
                    iterations: iteration,
                    residual,
                };
            }
        }
        Run {
            values: current,
            converged: false,
            iterations: config.max_iterations(),
            residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    const EPS: f64 = 1e-9;

    #[test]
    fn df_quad_aggregation() {
        assert_eq!(aggregate_df_quad(&[], &[0.375, 0.375], 0.5), 0.8046875);
        assert_eq!(aggregate_df_quad(&[], &[], 0.3), 0.3);
        for b in [0.0, 0.2, 0.5, 1.0] {
            assert_eq!(aggregate_df_quad(&[1.0], &[], b), 0.0);
        }
    }

    #[test]
    fn qe_aggregation() {
        // E = 0.3
        let delta = aggregate_qe(&[0.6], &[0.9], 0.7);
        assert!((delta - (0.7 + 0.3 * 0.09 / 1.09)).abs() < 1e-12);
        assert!((delta - 0.72).abs() < 5e-3);
        // E = 1.02
        let alpha = aggregate_qe(&[0.6], &[0.9, 0.72], 0.8);
        assert!((alpha - 0.9020).abs() < 1e-4);
        assert_eq!(aggregate_qe(&[], &[], 0.42), 0.42);
    }

    #[test]
    fn reb_aggregation() {
        for b in [0.0, 0.1, 0.3, 0.5, 0.77, 1.0] {
            assert_eq!(aggregate_reb(&[], &[], b), b);
            let balanced = aggregate_reb(&[0.4], &[0.4], b);
            assert!((balanced - b).abs() < 1e-12);
        }
        assert_eq!(aggregate_reb(&[0.3], &[0.9], 0.0), 0.0);
        assert!((aggregate_reb(&[], &[0.5], 0.5) - 0.588897).abs() < 1e-6);
    }

    #[test]
    fn fig2_df_quad_strengths() {
        let q = datasets::fig2();
        let s = evaluate(&q, Semantics::DfQuad, &ConvergenceConfig::default());
        assert!(s.converged);
        assert_eq!(s["alpha"], 0.8046875);
        assert_eq!(s["beta"], 0.375);
        assert_eq!(s["gamma"], 0.375);
        assert_eq!(s["delta"], 0.25);
        assert_eq!(s["zeta"], 0.5);
    }

    #[test]
    fn edgeless_is_base_scores() {
        let q = datasets::fig2()
            .restrict(&crate::model::EdgeSubset::empty())
            .unwrap();
        for sem in Semantics::ALL {
            let s = evaluate(&q, sem, &ConvergenceConfig::default());
            for (id, a) in q.arguments() {
                assert_eq!(s[id.as_str()], a.base_score);
            }
        }
    }

    #[test]
    fn llm_qe_strengths() {
        let q = datasets::llm();
        let s = evaluate(
            &q,
            Semantics::QuadraticEnergy,
            &ConvergenceConfig::default(),
        );
        assert_eq!(s["beta"], 0.6);
        assert_eq!(s["gamma"], 0.9);
        assert!((s["delta"] - 0.72).abs() < 5e-3);
        assert!((s["alpha"] - 0.90).abs() < 5e-3);
    }

    #[test]
    fn fig1_df_quad_strengths() {
        let q = datasets::fig1();
        let s = evaluate(&q, Semantics::DfQuad, &ConvergenceConfig::default());
        assert!((s["alpha"] - 0.95095).abs() < 1e-12);
        assert!((s["gamma"] - 0.91).abs() < 1e-12);
        assert!((s["delta"] - 0.91).abs() < 1e-12);
        assert!((s["xi"] - 0.009).abs() < 1e-12);
        // the printed 0.0099 is off: beta (0.9) alone attacks eta (0.1)
        assert!((s["eta"] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn acyclicity() {
        assert!(is_acyclic(&datasets::fig2()));
        assert!(is_acyclic(&datasets::fig1()));
        let selfloop = Qbaf::builder()
            .argument("a", 0.5)
            .attack("a", "a")
            .build()
            .unwrap();
        assert!(!is_acyclic(&selfloop));
    }

    #[test]
    fn topological_orders_agree_bitwise() {
        let q = datasets::fraud();
        let ev = Evaluator::new(&q);
        let forward = ev.evaluate(Semantics::DfQuad, None, &ConvergenceConfig::default());

        // a different valid order: Kahn's algorithm fed with reversed ids
        let n = q.num_arguments();
        let rev = topological_order(
            n,
            q.links()
                .iter()
                .map(|l| (n - 1 - l.source, n - 1 - l.target)),
        )
        .unwrap();
        let mut alt = ev.clone();
        alt.scope = rev.into_iter().map(|v| n - 1 - v).collect();
        assert_ne!(alt.scope, ev.scope);
        let other = alt.evaluate(Semantics::DfQuad, None, &ConvergenceConfig::default());
        assert_eq!(forward.values, other.values);
    }

    #[test]
    fn acyclic_iteration_matches_sweep() {
        let q = datasets::fig1();
        let mut ev = Evaluator::new(&q);
        for sem in Semantics::ALL {
            let sweep = ev.evaluate(sem, None, &ConvergenceConfig::default());
            ev.acyclic = false;
            let iterated = ev.evaluate(sem, None, &ConvergenceConfig::default());
            ev.acyclic = true;
            assert!(iterated.converged);
            for (a, b) in sweep.values.iter().zip(&iterated.values) {
                assert!((a - b).abs() <= EPS);
            }
        }
    }

    #[test]
    fn oscillation_is_reported() {
        // mutual full-strength attacks flip between 0 and 1 under synchronous sweeps
        let q = Qbaf::builder()
            .argument("a", 1.0)
            .argument("b", 1.0)
            .attack("a", "b")
            .attack("b", "a")
            .build()
            .unwrap();
        let cfg = ConvergenceConfig::new(1e-9, 50).unwrap();
        let s = evaluate(&q, Semantics::DfQuad, &cfg);
        assert!(!s.converged);
        assert_eq!(s.iterations, 50);
        assert!(s.residual > 0.5);
    }

    #[test]
    fn cyclic_converges() {
        let q = Qbaf::builder()
            .argument("a", 0.6)
            .argument("b", 0.4)
            .argument("c", 0.5)
            .attack("a", "b")
            .support("b", "c")
            .attack("c", "a")
            .support("c", "c")
            .build()
            .unwrap();
        let cfg = ConvergenceConfig::default();
        for sem in Semantics::ALL {
            let s = evaluate(&q, sem, &cfg);
            assert!(s.converged, "{sem}");
            assert!(s.residual <= cfg.tolerance());
            // fixpoint check
            let a = sem.aggregate(&[s["c"]], &[], 0.6);
            assert!((a - s["a"]).abs() < 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ConvergenceConfig::new(0.0, 10).is_err());
        assert!(ConvergenceConfig::new(1e-6, 0).is_err());
        assert!("DF-QuAD".parse::<Semantics>().is_ok());
        assert!("foo".parse::<Semantics>().is_err());
    }
}
