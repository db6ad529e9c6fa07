//! Executable checks of the attribution and semantics properties.
//!
//! Every checker returns a [`PropertyReport`]. A violated report carries a
//! [`Witness`] holding the framework and the numbers needed to replay it.
//! Frameworks with cycles are tagged [`Regime::Conjectural`]: guarantees
//! derived from monotonicity are only known to hold on acyclic frameworks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attribution::{shapley_from_values, subset_values, ExactOptions, TopicGame};
use crate::error::{Error, Result};
use crate::experiments::{generate, GenSpec};
use crate::graph::{classify_edge, sign_for_class, EdgeClass, SignPrediction};
use crate::io::QbafDocument;
use crate::model::{ArgumentId, Edge, EdgeId, EdgeSubset, Polarity, Qbaf};
use crate::semantics::{evaluate, is_acyclic, ConvergenceConfig, Semantics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyId {
    Efficiency,
    Justification,
    Dummy,
    Symmetry,
    Dominance,
    SignCorrectness,
    SignPrediction,
    Counterfactuality,
    QualitativeInvariability,
    QuantitativeVariability,
    Monotonicity,
    Stability,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        PropertyId::Efficiency,
        PropertyId::Justification,
        PropertyId::Dummy,
        PropertyId::Symmetry,
        PropertyId::Dominance,
        PropertyId::SignCorrectness,
        PropertyId::SignPrediction,
        PropertyId::Counterfactuality,
        PropertyId::QualitativeInvariability,
        PropertyId::QuantitativeVariability,
        PropertyId::Monotonicity,
        PropertyId::Stability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::Efficiency => "efficiency",
            PropertyId::Justification => "justification",
            PropertyId::Dummy => "dummy",
            PropertyId::Symmetry => "symmetry",
            PropertyId::Dominance => "dominance",
            PropertyId::SignCorrectness => "sign-correctness",
            PropertyId::SignPrediction => "sign-prediction",
            PropertyId::Counterfactuality => "counterfactuality",
            PropertyId::QualitativeInvariability => "qualitative-invariability",
            PropertyId::QuantitativeVariability => "quantitative-variability",
            PropertyId::Monotonicity => "monotonicity",
            PropertyId::Stability => "stability",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = PropertyId::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown property `{s}` (expected one of: {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The property's premise is false for this input.
    NotApplicable,
    /// The input is too large for the brute-force premise check.
    NotChecked,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "VIOLATED",
            Verdict::NotApplicable => "n/a",
            Verdict::NotChecked => "not checked",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Acyclic,
    /// At least one framework involved has a cycle.
    Conjectural,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub framework: QbafDocument,
    pub topic: Option<ArgumentId>,
    pub edges: Vec<Edge>,
    /// Edge subset exhibiting the violation, when one is involved.
    pub subset: Option<Vec<Edge>>,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub verdict: Verdict,
    pub regime: Regime,
    pub tolerance: f64,
    pub edges: Vec<Edge>,
    /// Whether the theory promises the property for this input: acyclic
    /// framework, monotonic semantics and, for the argumentative properties,
    /// a direct or indirect edge.
    pub guaranteed: bool,
    pub detail: String,
    pub values: BTreeMap<String, f64>,
    pub witness: Option<Witness>,
}

impl PropertyReport {
    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    /// Violated although the theory guarantees the property.
    pub fn is_unexpected_violation(&self) -> bool {
        self.is_violated() && self.guaranteed
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub config: ConvergenceConfig,
    pub tolerance: f64,
    /// Largest edge count for which premises are checked over all subsets.
    pub brute_force_limit: usize,
    pub exact: ExactOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            config: ConvergenceConfig::default(),
            tolerance: 1e-9,
            brute_force_limit: 12,
            exact: ExactOptions::default(),
        }
    }
}

/// Eleven evenly spaced values from 0 to 1.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariabilityMode {
    /// Only applies when the edge is its source's sole outgoing edge.
    Strict,
    /// Compares magnitudes whatever the source's other outgoing edges.
    Observational,
}

/// Exact attributions of one framework and topic, with the subset table
/// they were computed from.
struct Game<'q> {
    q: &'q Qbaf,
    semantics: Semantics,
    topic: String,
    opts: CheckOptions,
    cyclic: bool,
    values: Vec<f64>,
    phis: Vec<f64>,
}

impl<'q> Game<'q> {
    fn new(q: &'q Qbaf, semantics: Semantics, topic: &str, opts: &CheckOptions) -> Result<Self> {
        let game = TopicGame::new(q, semantics, topic, &opts.config)?;
        let n = q.num_edges();
        if n > opts.exact.max_edges {
            return Err(Error::ExactCapExceeded {
                edges: n,
                cap: opts.exact.max_edges,
            });
        }
        let values = subset_values(&game)?;
        let phis = shapley_from_values(&values, n);
        Ok(Self {
            q,
            semantics,
            topic: topic.to_owned(),
            opts: *opts,
            cyclic: !is_acyclic(q),
            values,
            phis,
        })
    }

    fn edge(&self, r: EdgeId) -> Result<&Edge> {
        if r.0 < self.q.num_edges() {
            Ok(self.q.edge(r))
        } else {
            Err(Error::InvalidSubset {
                index: r.0,
                len: self.q.num_edges(),
            })
        }
    }

    fn full(&self) -> usize {
        (1usize << self.q.num_edges()) - 1
    }

    fn regime(&self) -> Regime {
        if self.cyclic {
            Regime::Conjectural
        } else {
            Regime::Acyclic
        }
    }

    fn report(&self, property: PropertyId, edges: &[EdgeId]) -> PropertyReport {
        PropertyReport {
            property,
            verdict: Verdict::Holds,
            regime: self.regime(),
            tolerance: self.opts.tolerance,
            edges: edges.iter().map(|&e| self.q.edge(e).clone()).collect(),
            guaranteed: !self.cyclic,
            detail: String::new(),
            values: BTreeMap::new(),
            witness: None,
        }
    }

    fn violate(&self, report: &mut PropertyReport, subset: Option<usize>) {
        report.verdict = Verdict::Violated;
        report.witness = Some(Witness {
            framework: QbafDocument::from_qbaf(self.q),
            topic: Some(self.topic.as_str().into()),
            edges: report.edges.clone(),
            subset: subset.map(|mask| mask_edges(self.q, mask)),
            values: report.values.clone(),
        });
    }

    fn brute_force_allowed(&self, report: &mut PropertyReport) -> bool {
        if self.q.num_edges() > self.opts.brute_force_limit {
            report.verdict = Verdict::NotChecked;
            report.detail = format!(
                "{} edges exceed the brute-force limit of {}",
                self.q.num_edges(),
                self.opts.brute_force_limit
            );
            false
        } else {
            true
        }
    }

    fn class(&self, r: EdgeId) -> Result<EdgeClass> {
        classify_edge(self.q, r, &self.topic)
    }

    fn single_path(&self, r: EdgeId) -> Result<(EdgeClass, bool)> {
        let class = self.class(r)?;
        let single = matches!(class, EdgeClass::Direct | EdgeClass::Indirect { .. });
        Ok((class, single))
    }

    fn efficiency(&self) -> PropertyReport {
        let mut rep = self.report(PropertyId::Efficiency, &[]);
        let tau = self.values[0];
        let sigma = self.values[self.full()];
        let sum: f64 = self.phis.iter().sum();
        let residual = (sigma - tau - sum).abs();
        rep.values.insert("tau".into(), tau);
        rep.values.insert("sigma".into(), sigma);
        rep.values.insert("sum_phi".into(), sum);
        rep.values.insert("residual".into(), residual);
        rep.guaranteed = true;
        rep.detail = format!("sigma - tau = {}, sum of phi = {sum}", sigma - tau);
        if residual > self.opts.tolerance {
            self.violate(&mut rep, None);
        }
        rep
    }

    fn justification(&self) -> PropertyReport {
        let mut rep = self.report(PropertyId::Justification, &[]);
        rep.guaranteed = true;
        let tau = self.values[0];
        let sigma = self.values[self.full()];
        rep.values.insert("tau".into(), tau);
        rep.values.insert("sigma".into(), sigma);
        let shift = sigma - tau;
        if shift.abs() <= self.opts.tolerance {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = "strength equals base score".into();
            return rep;
        }
        let best = if shift > 0.0 {
            self.phis.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            self.phis.iter().copied().fold(f64::INFINITY, f64::min)
        };
        rep.values.insert("extreme_phi".into(), best);
        let justified = if shift > 0.0 { best > 0.0 } else { best < 0.0 };
        rep.detail = format!("strength shift {shift}, most aligned attribution {best}");
        if !justified {
            self.violate(&mut rep, None);
        }
        rep
    }

    fn dummy(&self, r: EdgeId) -> Result<PropertyReport> {
        self.edge(r)?;
        let mut rep = self.report(PropertyId::Dummy, &[r]);
        rep.guaranteed = true;
        if !self.brute_force_allowed(&mut rep) {
            return Ok(rep);
        }
        let bit = 1usize << r.0;
        let tol = self.opts.tolerance;
        let active = (0..=self.full())
            .filter(|s| s & bit == 0)
            .find(|&s| (self.values[s | bit] - self.values[s]).abs() > tol);
        if let Some(s) = active {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = format!(
                "edge changes the topic by {} on subset {{{}}}",
                self.values[s | bit] - self.values[s],
                format_mask(self.q, s)
            );
            return Ok(rep);
        }
        let phi = self.phis[r.0];
        rep.values.insert("phi".into(), phi);
        rep.detail = format!("no marginal effect; phi = {phi}");
        if phi.abs() > tol {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    fn pair_subsets(&self, ri: EdgeId, rj: EdgeId) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let (bi, bj) = (1usize << ri.0, 1usize << rj.0);
        (0..=self.full())
            .filter(move |s| s & (bi | bj) == 0)
            .map(move |s| (s, self.values[s | bi], self.values[s | bj]))
    }

    fn symmetry(&self, ri: EdgeId, rj: EdgeId) -> Result<PropertyReport> {
        self.edge(ri)?;
        self.edge(rj)?;
        let mut rep = self.report(PropertyId::Symmetry, &[ri, rj]);
        rep.guaranteed = true;
        if ri == rj {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = "edges are identical".into();
            return Ok(rep);
        }
        if !self.brute_force_allowed(&mut rep) {
            return Ok(rep);
        }
        let tol = self.opts.tolerance;
        let pairwise = self
            .pair_subsets(ri, rj)
            .find(|&(_, vi, vj)| (vi - vj).abs() > tol);
        let premise = match pairwise {
            None => "equal marginal effects on every subset".to_string(),
            Some((s, vi, vj)) => match self.game_automorphism(ri, rj) {
                Some(_) => "a relabelling of the framework swaps the edges".to_string(),
                None => {
                    rep.verdict = Verdict::NotApplicable;
                    rep.detail = format!(
                        "edges differ on subset {{{}}} ({vi} vs {vj}) and no relabelling swaps them",
                        format_mask(self.q, s)
                    );
                    return Ok(rep);
                }
            },
        };
        let (pi, pj) = (self.phis[ri.0], self.phis[rj.0]);
        rep.values.insert("phi_i".into(), pi);
        rep.values.insert("phi_j".into(), pj);
        rep.detail = format!("{premise}; phi = {pi} and {pj}");
        if (pi - pj).abs() > tol {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    /// An edge permutation taking `ri` to `rj` that leaves the topic's
    /// strength unchanged on every subset, found among the framework's
    /// automorphisms that fix the topic.
    fn game_automorphism(&self, ri: EdgeId, rj: EdgeId) -> Option<Vec<usize>> {
        let topic = self.q.index_of(&self.topic).ok()?;
        let perm = framework_automorphism(self.q, topic, ri.0, rj.0)?;
        let n = self.q.num_edges();
        let tol = self.opts.tolerance;
        let preserved = (0..=self.full()).all(|s| {
            let image = (0..n)
                .filter(|i| s >> i & 1 == 1)
                .fold(0usize, |acc, i| acc | 1 << perm[i]);
            (self.values[image] - self.values[s]).abs() <= tol
        });
        preserved.then_some(perm)
    }

    fn dominance(&self, ri: EdgeId, rj: EdgeId) -> Result<PropertyReport> {
        self.edge(ri)?;
        self.edge(rj)?;
        let mut rep = self.report(PropertyId::Dominance, &[ri, rj]);
        rep.guaranteed = true;
        if ri == rj {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = "edges are identical".into();
            return Ok(rep);
        }
        if !self.brute_force_allowed(&mut rep) {
            return Ok(rep);
        }
        let tol = self.opts.tolerance;
        let mut strict = None;
        for (s, vi, vj) in self.pair_subsets(ri, rj) {
            if vi < vj - tol {
                rep.verdict = Verdict::NotApplicable;
                rep.detail = format!(
                    "second edge is stronger on subset {{{}}}: {vi} < {vj}",
                    format_mask(self.q, s)
                );
                return Ok(rep);
            }
            if strict.is_none() && vi > vj + tol {
                strict = Some(s);
            }
        }
        let Some(s) = strict else {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = "first edge is never strictly stronger".into();
            return Ok(rep);
        };
        let (pi, pj) = (self.phis[ri.0], self.phis[rj.0]);
        rep.values.insert("phi_i".into(), pi);
        rep.values.insert("phi_j".into(), pj);
        rep.detail = format!(
            "first edge dominates (strictly on {{{}}}); phi = {pi} vs {pj}",
            format_mask(self.q, s)
        );
        if pi <= pj {
            self.violate(&mut rep, Some(s));
        }
        Ok(rep)
    }

    fn sign_correctness(&self, r: EdgeId) -> Result<PropertyReport> {
        let edge = self.edge(r)?;
        let (class, _) = self.single_path(r)?;
        let mut rep = self.report(PropertyId::SignCorrectness, &[r]);
        rep.guaranteed &= class == EdgeClass::Direct;
        let phi = self.phis[r.0];
        rep.values.insert("phi".into(), phi);
        rep.detail = format!(
            "{} edge, {class}, phi = {phi}",
            polarity_name(edge.polarity)
        );
        let tol = self.opts.tolerance;
        let ok = match edge.polarity {
            Polarity::Attack => phi <= tol,
            Polarity::Support => phi >= -tol,
        };
        if !ok {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    fn sign_prediction(&self, r: EdgeId) -> Result<PropertyReport> {
        let edge = self.edge(r)?;
        let (class, single) = self.single_path(r)?;
        let prediction = sign_for_class(edge.polarity, class);
        let mut rep = self.report(PropertyId::SignPrediction, &[r]);
        rep.guaranteed &= single;
        let phi = self.phis[r.0];
        rep.values.insert("phi".into(), phi);
        rep.detail = format!("{class}, predicted {prediction}, phi = {phi}");
        if prediction == SignPrediction::Unknown {
            rep.verdict = Verdict::NotApplicable;
        } else if !prediction.agrees(phi, self.opts.tolerance) {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    fn counterfactuality(&self, r: EdgeId) -> Result<PropertyReport> {
        self.edge(r)?;
        let (class, single) = self.single_path(r)?;
        let mut rep = self.report(PropertyId::Counterfactuality, &[r]);
        rep.guaranteed &= single;
        let phi = self.phis[r.0];
        let sigma = self.values[self.full()];
        let without = self.values[self.full() & !(1usize << r.0)];
        rep.values.insert("phi".into(), phi);
        rep.values.insert("sigma".into(), sigma);
        rep.values.insert("sigma_without".into(), without);
        rep.detail =
            format!("{class}, phi = {phi}, strength {sigma} with the edge and {without} without");
        let tol = self.opts.tolerance;
        let ok = if phi > tol {
            sigma >= without - tol
        } else if phi < -tol {
            sigma <= without + tol
        } else {
            rep.verdict = Verdict::NotApplicable;
            return Ok(rep);
        };
        if !ok {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    /// Exact attribution of `r` after setting its source's base score.
    fn phi_with_source_score(&self, r: EdgeId, delta: f64) -> Result<f64> {
        let source = self.q.edge(r).source.clone();
        let changed = self.q.with_base_score(source.as_str(), delta)?;
        let game = TopicGame::new(&changed, self.semantics, &self.topic, &self.opts.config)?;
        let values = subset_values(&game)?;
        Ok(shapley_from_values(&values, changed.num_edges())[r.0])
    }

    fn qualitative_invariability(&self, r: EdgeId, grid: &[f64]) -> Result<PropertyReport> {
        self.edge(r)?;
        let (class, single) = self.single_path(r)?;
        let mut rep = self.report(PropertyId::QualitativeInvariability, &[r]);
        rep.guaranteed &= single;
        let phi = self.phis[r.0];
        rep.values.insert("phi".into(), phi);
        let tol = self.opts.tolerance;
        if phi.abs() <= tol {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = format!("{class}, phi = {phi} is neutral");
            return Ok(rep);
        }
        let grid = if grid.is_empty() {
            default_delta_grid()
        } else {
            grid.to_vec()
        };
        let mut flipped = Vec::new();
        for &delta in &grid {
            let phi_delta = self.phi_with_source_score(r, delta)?;
            rep.values.insert(format!("phi@{delta}"), phi_delta);
            if (phi > 0.0 && phi_delta < -tol) || (phi < 0.0 && phi_delta > tol) {
                flipped.push(delta);
            }
        }
        rep.detail = format!("{class}, phi = {phi}, {} source scores tried", grid.len());
        if !flipped.is_empty() {
            rep.detail.push_str(&format!("; sign flips at {flipped:?}"));
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }

    fn quantitative_variability(
        &self,
        r: EdgeId,
        delta: f64,
        mode: VariabilityMode,
    ) -> Result<PropertyReport> {
        let edge = self.edge(r)?.clone();
        let (class, single) = self.single_path(r)?;
        let mut rep = self.report(PropertyId::QuantitativeVariability, &[r]);
        let sole = self.q.outgoing(edge.source.as_str())? == vec![r];
        rep.guaranteed &= single && sole && mode == VariabilityMode::Strict;
        if edge.source.as_str() == self.topic {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = "source is the topic".into();
            return Ok(rep);
        }
        if mode == VariabilityMode::Strict && !sole {
            rep.verdict = Verdict::NotApplicable;
            rep.detail = format!("`{}` has other outgoing edges", edge.source);
            return Ok(rep);
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::BaseScoreOutOfRange {
                argument: edge.source.clone(),
                score: delta,
            });
        }
        let tau = self
            .q
            .base_score(edge.source.as_str())
            .expect("edge source exists");
        let phi = self.phis[r.0];
        let phi_delta = self.phi_with_source_score(r, delta)?;
        rep.values.insert("tau".into(), tau);
        rep.values.insert("delta".into(), delta);
        rep.values.insert("phi".into(), phi);
        rep.values.insert("phi_delta".into(), phi_delta);
        let tol = self.opts.tolerance;
        let ok = if delta < tau {
            phi_delta.abs() <= phi.abs() + tol
        } else if delta > tau {
            phi_delta.abs() >= phi.abs() - tol
        } else {
            (phi_delta - phi).abs() <= tol
        };
        rep.detail = format!(
            "{class}, source score {tau} -> {delta} moves phi {phi} -> {phi_delta} ({mode:?} mode)"
        );
        if !ok {
            self.violate(&mut rep, None);
        }
        Ok(rep)
    }
}

/// Searches for a bijection of arguments that fixes `topic`, preserves base
/// scores and edges with their polarity, and maps edge `from` onto edge `to`.
/// Returns the induced edge permutation.
fn framework_automorphism(q: &Qbaf, topic: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let links = q.links();
    let n = q.num_arguments();
    if links[from].polarity != links[to].polarity {
        return None;
    }
    let tau = q.base_scores();
    let mut edge_at = HashMap::new();
    let mut signature = vec![[0usize; 5]; n];
    for (i, l) in links.iter().enumerate() {
        edge_at.insert((l.source, l.target), (i, l.polarity));
        let k = usize::from(l.polarity == Polarity::Support);
        signature[l.source][k] += 1;
        signature[l.target][2 + k] += 1;
        if l.source == l.target {
            signature[l.source][4] += 1;
        }
    }
    let compatible =
        |a: usize, b: usize| tau[a].to_bits() == tau[b].to_bits() && signature[a] == signature[b];

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (a, b) in [
        (topic, topic),
        (links[from].source, links[to].source),
        (links[from].target, links[to].target),
    ] {
        if map[a] == usize::MAX && !used[b] && compatible(a, b) {
            map[a] = b;
            used[b] = true;
        } else if map[a] != b {
            return None;
        }
    }

    // every edge between assigned arguments must have an image
    let consistent = |map: &[usize], a: usize| {
        links.iter().all(|l| {
            if l.source != a && l.target != a {
                return true;
            }
            let (s, t) = (map[l.source], map[l.target]);
            s == usize::MAX
                || t == usize::MAX
                || edge_at.get(&(s, t)).map(|e| e.1) == Some(l.polarity)
        })
    };
    let fixed: Vec<usize> = (0..n).filter(|&a| map[a] != usize::MAX).collect();
    if !fixed.iter().all(|&a| consistent(&map, a)) {
        return None;
    }
    let free: Vec<usize> = (0..n).filter(|&a| map[a] == usize::MAX).collect();

    fn extend(
        k: usize,
        free: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        compatible: &dyn Fn(usize, usize) -> bool,
        consistent: &dyn Fn(&[usize], usize) -> bool,
    ) -> bool {
        let Some(&a) = free.get(k) else {
            return true;
        };
        for b in 0..map.len() {
            if used[b] || !compatible(a, b) {
                continue;
            }
            map[a] = b;
            used[b] = true;
            if consistent(map, a) && extend(k + 1, free, map, used, compatible, consistent) {
                return true;
            }
            map[a] = usize::MAX;
            used[b] = false;
        }
        false
    }
    if !extend(0, &free, &mut map, &mut used, &compatible, &consistent) {
        return None;
    }
    Some(
        links
            .iter()
            .map(|l| edge_at[&(map[l.source], map[l.target])].0)
            .collect(),
    )
}

fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::Attack => "attack",
        Polarity::Support => "support",
    }
}

fn mask_edges(q: &Qbaf, mask: usize) -> Vec<Edge> {
    (0..q.num_edges())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| q.edges()[i].clone())
        .collect()
}

fn format_mask(q: &Qbaf, mask: usize) -> String {
    mask_edges(q, mask)
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn check_efficiency(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Ok(Game::new(q, semantics, topic, opts)?.efficiency())
}

pub fn check_justification(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Ok(Game::new(q, semantics, topic, opts)?.justification())
}

pub fn check_dummy(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.dummy(r)
}

pub fn check_symmetry(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    ri: EdgeId,
    rj: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.symmetry(ri, rj)
}

pub fn check_dominance(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    ri: EdgeId,
    rj: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.dominance(ri, rj)
}

/// Attacks must not raise the topic and supports must not lower it.
pub fn check_sign_correctness(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.sign_correctness(r)
}

/// The attribution's sign must agree with the path-parity prediction.
pub fn check_sign_prediction(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.sign_prediction(r)
}

pub fn check_counterfactuality(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.counterfactuality(r)
}

/// An empty `grid` uses [`default_delta_grid`].
pub fn check_qualitative_invariability(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    grid: &[f64],
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.qualitative_invariability(r, grid)
}

pub fn check_quantitative_variability(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    r: EdgeId,
    delta: f64,
    mode: VariabilityMode,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    Game::new(q, semantics, topic, opts)?.quantitative_variability(r, delta, mode)
}

/// Runs the framework-level checks in `properties` against one topic.
///
/// Edge properties are checked for every edge; pair properties for every
/// pair whose premise holds, with a single not-applicable report when none
/// does. Monotonicity and stability are not framework-level and are skipped.
pub fn check_framework(
    q: &Qbaf,
    semantics: Semantics,
    topic: &str,
    properties: &[PropertyId],
    opts: &CheckOptions,
) -> Result<Vec<PropertyReport>> {
    let game = Game::new(q, semantics, topic, opts)?;
    let ids: Vec<EdgeId> = q.edge_ids().collect();
    let mut reports = Vec::new();
    for &p in properties {
        match p {
            PropertyId::Efficiency => reports.push(game.efficiency()),
            PropertyId::Justification => reports.push(game.justification()),
            PropertyId::Dummy => {
                for &r in &ids {
                    reports.push(game.dummy(r)?);
                }
            }
            PropertyId::Symmetry | PropertyId::Dominance => {
                let mut pair_reports = Vec::new();
                for &ri in &ids {
                    for &rj in &ids {
                        let keep = match p {
                            PropertyId::Symmetry => ri < rj,
                            _ => ri != rj,
                        };
                        if !keep {
                            continue;
                        }
                        let rep = if p == PropertyId::Symmetry {
                            game.symmetry(ri, rj)?
                        } else {
                            game.dominance(ri, rj)?
                        };
                        if rep.verdict == Verdict::NotChecked {
                            pair_reports = vec![rep];
                            break;
                        }
                        if rep.verdict != Verdict::NotApplicable {
                            pair_reports.push(rep);
                        }
                    }
                    if pair_reports
                        .first()
                        .is_some_and(|r| r.verdict == Verdict::NotChecked)
                    {
                        break;
                    }
                }
                if pair_reports.is_empty() {
                    let mut rep = game.report(p, &[]);
                    rep.verdict = Verdict::NotApplicable;
                    rep.detail = "no edge pair satisfies the premise".into();
                    pair_reports.push(rep);
                }
                reports.extend(pair_reports);
            }
            PropertyId::SignCorrectness => {
                for &r in &ids {
                    reports.push(game.sign_correctness(r)?);
                }
            }
            PropertyId::SignPrediction => {
                for &r in &ids {
                    reports.push(game.sign_prediction(r)?);
                }
            }
            PropertyId::Counterfactuality => {
                for &r in &ids {
                    reports.push(game.counterfactuality(r)?);
                }
            }
            PropertyId::QualitativeInvariability => {
                for &r in &ids {
                    reports.push(game.qualitative_invariability(r, &[])?);
                }
            }
            PropertyId::QuantitativeVariability => {
                for &r in &ids {
                    let tau = q
                        .base_score(q.edge(r).source.as_str())
                        .expect("source exists");
                    for delta in [tau / 2.0, (1.0 + tau) / 2.0] {
                        reports.push(game.quantitative_variability(
                            r,
                            delta,
                            VariabilityMode::Strict,
                        )?);
                    }
                }
            }
            PropertyId::Monotonicity | PropertyId::Stability => {}
        }
    }
    Ok(reports)
}

/// One random monotonicity instance: a framework in which `beta`'s only
/// outgoing edge goes to `alpha`, plus a second base score for `beta`.
struct MonotonicityCase {
    q: Qbaf,
    alpha: String,
    edge: EdgeId,
    low: f64,
    high: f64,
}

fn monotonicity_case(rng: &mut ChaCha8Rng) -> Result<MonotonicityCase> {
    let n = rng.random_range(1..=7usize);
    let max = n * (n - 1) / 2;
    let m = rng.random_range(0..=max.min(10));
    let base = generate(&GenSpec {
        support_fraction: rng.random(),
        ..GenSpec::new(n, m, false, rng.random())
    })?;
    let a = rng.random_range(0..n);

    let mut b = Qbaf::builder();
    for (id, arg) in base.arguments() {
        b = b.argument(id.clone(), arg.base_score);
    }
    for e in base.edges() {
        b = b.edge(e.clone());
    }
    b = b.argument("beta", rng.random());
    // arguments numbered above `a` cannot be reached from it, so edges from
    // them into beta keep the framework acyclic
    for x in a + 1..n {
        if rng.random_bool(0.3) {
            let polarity = if rng.random_bool(0.5) {
                Polarity::Support
            } else {
                Polarity::Attack
            };
            b = b.edge(Edge {
                source: x.to_string().into(),
                target: "beta".into(),
                polarity,
            });
        }
    }
    let edge = if rng.random_bool(0.5) {
        Edge::support("beta", a.to_string())
    } else {
        Edge::attack("beta", a.to_string())
    };
    b = b.edge(edge.clone());
    let q = b.build()?;
    let id = q.edge_id(&edge).expect("just added");
    let (x, y): (f64, f64) = (rng.random(), rng.random());
    Ok(MonotonicityCase {
        q,
        alpha: a.to_string(),
        edge: id,
        low: x.min(y),
        high: x.max(y),
    })
}

fn strength(q: &Qbaf, semantics: Semantics, topic: &str, config: &ConvergenceConfig) -> f64 {
    evaluate(q, semantics, config)[topic]
}

/// All four monotonicity clauses on one case; returns the observed values
/// and the first failing clause.
fn monotonicity_trial(
    case: &MonotonicityCase,
    semantics: Semantics,
    opts: &CheckOptions,
) -> Result<(BTreeMap<String, f64>, Option<&'static str>)> {
    let cfg = &opts.config;
    let tol = opts.tolerance;
    let q = &case.q;
    let alpha = case.alpha.as_str();
    let attack = q.edge(case.edge).is_attack();

    let sigma = strength(q, semantics, alpha, cfg);
    let mut rest = q.full_subset();
    rest.remove(case.edge);
    let without = strength(&q.restrict(&rest)?, semantics, alpha, cfg);
    let low = strength(&q.with_base_score("beta", case.low)?, semantics, alpha, cfg);
    let high = strength(
        &q.with_base_score("beta", case.high)?,
        semantics,
        alpha,
        cfg,
    );

    let values = BTreeMap::from([
        ("sigma".to_string(), sigma),
        ("sigma_without_edge".to_string(), without),
        ("beta_low".to_string(), case.low),
        ("beta_high".to_string(), case.high),
        ("sigma_beta_low".to_string(), low),
        ("sigma_beta_high".to_string(), high),
    ]);
    let failed = if attack && sigma > without + tol {
        Some("attack raised the target")
    } else if !attack && sigma < without - tol {
        Some("support lowered the target")
    } else if attack && low < high - tol {
        Some("stronger attacker raised the target")
    } else if !attack && low > high + tol {
        Some("stronger supporter lowered the target")
    } else {
        None
    };
    Ok((values, failed))
}

type MonotonicityFailure = (MonotonicityCase, BTreeMap<String, f64>, &'static str);

/// Framework, argument, base score and final strength of an unstable argument.
type StabilityFailure = (Qbaf, ArgumentId, f64, f64);

/// Random acyclic frameworks containing an argument `beta` whose sole
/// outgoing edge targets some `alpha`; checks that removing the edge and
/// raising `beta`'s base score move `alpha` in the expected direction.
///
/// Trial `i` draws from stream `i` of the seed, so the outcome does not
/// depend on scheduling.
pub fn check_monotonicity(
    semantics: Semantics,
    trials: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let outcomes: Vec<Result<Option<MonotonicityFailure>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let case = monotonicity_case(&mut rng)?;
            let (values, failed) = monotonicity_trial(&case, semantics, opts)?;
            Ok(failed.map(|why| (case, values, why)))
        })
        .collect();

    let mut violations = 0usize;
    let mut first = None;
    for outcome in outcomes {
        if let Some(v) = outcome? {
            violations += 1;
            if first.is_none() {
                first = Some(v);
            }
        }
    }
    let mut rep = PropertyReport {
        property: PropertyId::Monotonicity,
        verdict: Verdict::Holds,
        regime: Regime::Acyclic,
        tolerance: opts.tolerance,
        edges: Vec::new(),
        guaranteed: true,
        detail: format!(
            "{trials} random acyclic frameworks under {semantics}, {violations} violations"
        ),
        values: BTreeMap::from([
            ("trials".to_string(), trials as f64),
            ("violations".to_string(), violations as f64),
        ]),
        witness: None,
    };
    if let Some((case, values, why)) = first {
        rep.verdict = Verdict::Violated;
        rep.detail.push_str(&format!("; first: {why}"));
        rep.edges = vec![case.q.edge(case.edge).clone()];
        rep.witness = Some(Witness {
            framework: QbafDocument::from_qbaf(&case.q),
            topic: Some(case.alpha.as_str().into()),
            edges: rep.edges.clone(),
            subset: None,
            values,
        });
    }
    Ok(rep)
}

/// Random frameworks, half of them cyclic: every argument without incoming
/// edges must keep exactly its base score.
pub fn check_stability(
    semantics: Semantics,
    trials: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let outcomes: Vec<Result<Option<StabilityFailure>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let cyclic = i % 2 == 1;
            let n = rng.random_range(1..=8usize);
            let spec = GenSpec::new(n, 0, cyclic, rng.random());
            let max = spec.max_edges().min(14);
            let low = usize::from(cyclic);
            let q = generate(&GenSpec {
                num_edges: rng.random_range(low..=max),
                ..spec
            })?;
            let s = evaluate(&q, semantics, &opts.config);
            for (id, arg) in q.arguments() {
                if q.incoming(id.as_str())?.is_empty() && s[id.as_str()] != arg.base_score {
                    return Ok(Some((
                        q.clone(),
                        id.clone(),
                        arg.base_score,
                        s[id.as_str()],
                    )));
                }
            }
            Ok(None)
        })
        .collect();

    let mut rep = PropertyReport {
        property: PropertyId::Stability,
        verdict: Verdict::Holds,
        regime: if trials > 1 {
            Regime::Conjectural
        } else {
            Regime::Acyclic
        },
        tolerance: 0.0,
        edges: Vec::new(),
        guaranteed: true,
        detail: format!("{trials} random frameworks under {semantics}"),
        values: BTreeMap::from([("trials".to_string(), trials as f64)]),
        witness: None,
    };
    for outcome in outcomes {
        if let Some((q, id, tau, sigma)) = outcome? {
            rep.verdict = Verdict::Violated;
            rep.detail =
                format!("argument `{id}` has no incoming edges but moved from {tau} to {sigma}");
            rep.witness = Some(Witness {
                framework: QbafDocument::from_qbaf(&q),
                topic: Some(id),
                edges: Vec::new(),
                subset: None,
                values: BTreeMap::from([("tau".to_string(), tau), ("sigma".to_string(), sigma)]),
            });
            break;
        }
    }
    Ok(rep)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Replays a violation witness: rebuilds its framework.
pub fn witness_framework(w: &Witness) -> Result<Qbaf> {
    w.framework.to_qbaf()
}

/// Subset of `q` named by a witness.
pub fn witness_subset(q: &Qbaf, w: &Witness) -> Result<Option<EdgeSubset>> {
    w.subset
        .as_ref()
        .map(|edges| EdgeSubset::from_edges(q, edges))
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{self, fig2_edge, llm_edge};

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    fn fig2_id(q: &Qbaf, r: usize) -> EdgeId {
        q.edge_id(&fig2_edge(r)).unwrap()
    }

    #[test]
    fn efficiency_on_examples() {
        let rep = check_efficiency(&datasets::fig2(), Semantics::DfQuad, "alpha", &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!((rep.values["sum_phi"] - 0.3046875).abs() < 1e-12);
        let rep = check_efficiency(
            &datasets::llm(),
            Semantics::QuadraticEnergy,
            "alpha",
            &opts(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        let edgeless = Qbaf::builder().argument("a", 0.2).build().unwrap();
        let rep = check_efficiency(&edgeless, Semantics::RestrictedEuler, "a", &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.values["sum_phi"], 0.0);
    }

    #[test]
    fn justification_on_fig2() {
        let rep =
            check_justification(&datasets::fig2(), Semantics::DfQuad, "alpha", &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.values["extreme_phi"] > 0.0);
        let rep =
            check_justification(&datasets::fig2(), Semantics::DfQuad, "zeta", &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn dummy_on_fig2() {
        let q = datasets::fig2();
        let rep = check_dummy(&q, Semantics::DfQuad, "beta", fig2_id(&q, 1), &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.values["phi"], 0.0);
        let rep = check_dummy(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 1), &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn symmetry_on_fig2() {
        let q = datasets::fig2();
        let check = |a, b| {
            check_symmetry(
                &q,
                Semantics::DfQuad,
                "alpha",
                fig2_id(&q, a),
                fig2_id(&q, b),
                &opts(),
            )
            .unwrap()
        };
        assert_eq!(check(1, 2).verdict, Verdict::Holds);
        assert_eq!(check(3, 4).verdict, Verdict::Holds);
        assert_eq!(check(1, 3).verdict, Verdict::NotApplicable);
        assert_eq!(check(1, 1).verdict, Verdict::NotApplicable);
        assert!(check(1, 2).detail.contains("relabelling"));

        // two leaves supporting the topic directly: pairwise premise holds
        let twins = Qbaf::builder()
            .argument("t", 0.5)
            .argument("x", 0.3)
            .argument("y", 0.3)
            .support("x", "t")
            .support("y", "t")
            .build()
            .unwrap();
        let rep = check_symmetry(
            &twins,
            Semantics::QuadraticEnergy,
            "t",
            EdgeId(0),
            EdgeId(1),
            &opts(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.detail.starts_with("equal marginal"));
        let skewed = twins.with_base_score("y", 0.4).unwrap();
        let rep = check_symmetry(
            &skewed,
            Semantics::QuadraticEnergy,
            "t",
            EdgeId(0),
            EdgeId(1),
            &opts(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn dominance_on_fig2_with_strong_beta() {
        let q = datasets::fig2().with_base_score("beta", 1.0).unwrap();
        let (r1, r2) = (fig2_id(&q, 1), fig2_id(&q, 2));
        let rep = check_dominance(&q, Semantics::DfQuad, "alpha", r1, r2, &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "{}", rep.detail);
        assert!((rep.values["phi_i"] - 0.3375).abs() < 1e-9);
        assert!((rep.values["phi_j"] - 0.1292).abs() < 1e-4);
        let rep = check_dominance(&q, Semantics::DfQuad, "alpha", r2, r1, &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn sign_checks_on_fig2() {
        let q = datasets::fig2();
        let rep = check_sign_correctness(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 5), &opts())
            .unwrap();
        assert!(rep.is_violated());
        assert!(!rep.is_unexpected_violation());
        assert!(rep.witness.is_some());
        let rep =
            check_sign_prediction(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 3), &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.guaranteed);
        let rep =
            check_sign_prediction(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 5), &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn counterfactuality_on_fig2() {
        let q = datasets::fig2();
        let rep = check_counterfactuality(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 1), &opts())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.values["sigma_without"], 0.6875);
        let rep = check_counterfactuality(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 3), &opts())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.values["sigma_without"], 0.84375);
        let rep = check_counterfactuality(&q, Semantics::DfQuad, "beta", fig2_id(&q, 1), &opts())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn qualitative_invariability_on_examples() {
        let q = datasets::fig2();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let rep = check_qualitative_invariability(
            &q,
            Semantics::DfQuad,
            "alpha",
            fig2_id(&q, 1),
            &grid,
            &opts(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(grid.iter().all(|d| rep.values[&format!("phi@{d}")] >= 0.0));

        let q = datasets::llm();
        let r1 = q.edge_id(&llm_edge(1)).unwrap();
        let rep = check_qualitative_invariability(
            &q,
            Semantics::QuadraticEnergy,
            "alpha",
            r1,
            &[0.95],
            &opts(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!((rep.values["phi@0.95"] - 0.1182).abs() < 1e-4);
    }

    #[test]
    fn quantitative_variability_modes() {
        let q = datasets::llm();
        let r1 = q.edge_id(&llm_edge(1)).unwrap();
        let r3 = q.edge_id(&llm_edge(3)).unwrap();
        let strict = check_quantitative_variability(
            &q,
            Semantics::QuadraticEnergy,
            "alpha",
            r3,
            0.95,
            VariabilityMode::Strict,
            &opts(),
        )
        .unwrap();
        assert_eq!(strict.verdict, Verdict::NotApplicable);
        let observed = check_quantitative_variability(
            &q,
            Semantics::QuadraticEnergy,
            "alpha",
            r3,
            0.95,
            VariabilityMode::Observational,
            &opts(),
        )
        .unwrap();
        assert_eq!(observed.verdict, Verdict::Holds);
        assert!((observed.values["phi_delta"] - 0.008438).abs() < 1e-4);
        let observed = check_quantitative_variability(
            &q,
            Semantics::QuadraticEnergy,
            "alpha",
            r1,
            0.95,
            VariabilityMode::Observational,
            &opts(),
        )
        .unwrap();
        assert!((observed.values["phi_delta"] - 0.1182).abs() < 1e-4);

        // chain c -> b -> a: every source has one outgoing edge
        let chain = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.4)
            .argument("c", 0.7)
            .argument("d", 0.3)
            .support("b", "a")
            .attack("c", "b")
            .support("d", "c")
            .build()
            .unwrap();
        for r in chain.edge_ids() {
            for delta in [0.0, 0.2, 0.5, 0.9, 1.0] {
                let rep = check_quantitative_variability(
                    &chain,
                    Semantics::DfQuad,
                    "a",
                    r,
                    delta,
                    VariabilityMode::Strict,
                    &opts(),
                )
                .unwrap();
                assert_eq!(rep.verdict, Verdict::Holds, "{}", rep.detail);
                assert!(rep.guaranteed);
            }
        }
    }

    #[test]
    fn brute_force_limit() {
        let q = crate::experiments::generate(&GenSpec::new(8, 14, false, 1)).unwrap();
        let rep = check_dummy(&q, Semantics::DfQuad, "0", EdgeId(0), &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotChecked);
    }

    #[test]
    fn framework_sweep_on_fig2() {
        let q = datasets::fig2();
        let reports =
            check_framework(&q, Semantics::DfQuad, "alpha", &PropertyId::ALL, &opts()).unwrap();
        assert!(
            reports.iter().all(|r| !r.is_unexpected_violation()),
            "{reports:#?}"
        );
        assert!(reports
            .iter()
            .any(|r| r.property == PropertyId::Symmetry && r.verdict == Verdict::Holds));
    }

    #[test]
    fn monotonicity_and_stability_hold() {
        for sem in Semantics::ALL {
            let rep = check_monotonicity(sem, 200, 5, &opts()).unwrap();
            assert_eq!(rep.verdict, Verdict::Holds, "{sem}: {}", rep.detail);
            let rep = check_stability(sem, 100, 5, &opts()).unwrap();
            assert_eq!(rep.verdict, Verdict::Holds, "{sem}: {}", rep.detail);
        }
        let a = check_monotonicity(Semantics::DfQuad, 50, 9, &opts()).unwrap();
        assert_eq!(
            a,
            check_monotonicity(Semantics::DfQuad, 50, 9, &opts()).unwrap()
        );
    }

    #[test]
    fn witness_replays() {
        let q = datasets::fig2();
        let rep = check_sign_correctness(&q, Semantics::DfQuad, "alpha", fig2_id(&q, 5), &opts())
            .unwrap();
        let w = rep.witness.unwrap();
        let replay = witness_framework(&w).unwrap();
        assert_eq!(replay, q);
        let again = check_sign_correctness(
            &replay,
            Semantics::DfQuad,
            "alpha",
            fig2_id(&replay, 5),
            &opts(),
        )
        .unwrap();
        assert!(again.is_violated());
    }

    #[test]
    fn names_round_trip() {
        for p in PropertyId::ALL {
            assert_eq!(p.name().parse::<PropertyId>().unwrap(), p);
        }
        assert!("nonsense".parse::<PropertyId>().is_err());
    }
}
