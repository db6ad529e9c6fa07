//! Framework representation: arguments with base scores and disjoint attack
//! and support relations, plus the two transformations every evaluation is
//! built from (edge restriction and base-score override).

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for ArgumentId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ArgumentId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for ArgumentId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Attack,
    Support,
}

impl Polarity {
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Attack => "-",
            Polarity::Support => "+",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: ArgumentId,
    pub target: ArgumentId,
    pub polarity: Polarity,
}

impl Edge {
    pub fn attack(source: impl Into<ArgumentId>, target: impl Into<ArgumentId>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            polarity: Polarity::Attack,
        }
    }

    pub fn support(source: impl Into<ArgumentId>, target: impl Into<ArgumentId>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            polarity: Polarity::Support,
        }
    }

    pub fn is_attack(&self) -> bool {
        self.polarity == Polarity::Attack
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.polarity {
            Polarity::Attack => "att",
            Polarity::Support => "sup",
        };
        write!(f, "{kind}({},{})", self.source, self.target)
    }
}

/// Position of an edge in its framework's edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Argument {
    pub base_score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Index form of an edge, used by the evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Link {
    pub source: usize,
    pub target: usize,
    pub polarity: Polarity,
}

/// A quantitative bipolar argumentation framework.
///
/// Immutable once built; every constructor validates the framework so an
/// invalid one can never be observed.
#[derive(Clone, Debug)]
pub struct Qbaf {
    arguments: IndexMap<ArgumentId, Argument>,
    edges: Vec<Edge>,
    links: Vec<Link>,
}

impl Qbaf {
    pub fn builder() -> QbafBuilder {
        QbafBuilder::default()
    }

    /// Builds a framework from `(id, base score)` pairs and edges.
    pub fn new<I, A, E>(arguments: I, edges: E) -> Result<Self>
    where
        I: IntoIterator<Item = (A, f64)>,
        A: Into<ArgumentId>,
        E: IntoIterator<Item = Edge>,
    {
        let mut builder = QbafBuilder::default();
        for (id, score) in arguments {
            builder = builder.argument(id, score);
        }
        for edge in edges {
            builder = builder.edge(edge);
        }
        builder.build()
    }

    fn from_parts(arguments: IndexMap<ArgumentId, Argument>, edges: Vec<Edge>) -> Result<Self> {
        for (id, arg) in &arguments {
            check_score(id, arg.base_score)?;
        }
        let mut pairs: HashMap<(usize, usize), Polarity> = HashMap::with_capacity(edges.len());
        let mut links = Vec::with_capacity(edges.len());
        for edge in &edges {
            let source = arguments
                .get_index_of(edge.source.as_str())
                .ok_or_else(|| Error::UnknownArgument(edge.source.clone()))?;
            let target = arguments
                .get_index_of(edge.target.as_str())
                .ok_or_else(|| Error::UnknownArgument(edge.target.clone()))?;
            match pairs.insert((source, target), edge.polarity) {
                Some(p) if p == edge.polarity => return Err(Error::DuplicateEdge(edge.clone())),
                Some(_) => {
                    return Err(Error::PolarityConflict(
                        edge.source.clone(),
                        edge.target.clone(),
                    ))
                }
                None => {}
            }
            links.push(Link {
                source,
                target,
                polarity: edge.polarity,
            });
        }
        Ok(Self {
            arguments,
            edges,
            links,
        })
    }

    pub fn num_arguments(&self) -> usize {
        self.arguments.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn arguments(&self) -> impl ExactSizeIterator<Item = (&ArgumentId, &Argument)> {
        self.arguments.iter()
    }

    pub fn argument_ids(&self) -> impl ExactSizeIterator<Item = &ArgumentId> {
        self.arguments.keys()
    }

    pub fn argument(&self, id: &str) -> Option<&Argument> {
        self.arguments.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.arguments.contains_key(id)
    }

    pub fn base_score(&self, id: &str) -> Option<f64> {
        self.arguments.get(id).map(|a| a.base_score)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    /// Looks up the edge between `source` and `target`, whatever its polarity.
    pub fn find_edge(&self, source: &str, target: &str) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| e.source.as_str() == source && e.target.as_str() == target)
            .map(EdgeId)
    }

    pub fn edge_id(&self, edge: &Edge) -> Option<EdgeId> {
        self.edges.iter().position(|e| e == edge).map(EdgeId)
    }

    pub(crate) fn index_of(&self, id: &str) -> Result<usize> {
        self.arguments
            .get_index_of(id)
            .ok_or_else(|| Error::UnknownArgument(ArgumentId::from(id)))
    }

    pub(crate) fn id_at(&self, index: usize) -> &ArgumentId {
        self.arguments.get_index(index).expect("argument index").0
    }

    pub(crate) fn base_scores(&self) -> Vec<f64> {
        self.arguments.values().map(|a| a.base_score).collect()
    }

    pub(crate) fn links(&self) -> &[Link] {
        &self.links
    }

    /// The framework restricted to the edges of `subset`; arguments and base
    /// scores are untouched.
    pub fn restrict(&self, subset: &EdgeSubset) -> Result<Qbaf> {
        if let Some(&index) = subset.members.iter().find(|&&i| i >= self.edges.len()) {
            return Err(Error::InvalidSubset {
                index,
                len: self.edges.len(),
            });
        }
        let mut edges = Vec::with_capacity(subset.len());
        let mut links = Vec::with_capacity(subset.len());
        for &i in &subset.members {
            edges.push(self.edges[i].clone());
            links.push(self.links[i]);
        }
        Ok(Qbaf {
            arguments: self.arguments.clone(),
            edges,
            links,
        })
    }

    /// Replaces every base score. `scores` must cover exactly the framework's
    /// arguments.
    pub fn override_base_scores(&self, scores: &HashMap<ArgumentId, f64>) -> Result<Qbaf> {
        if let Some(extra) = scores
            .keys()
            .find(|k| !self.arguments.contains_key(k.as_str()))
        {
            return Err(Error::UnknownArgument(extra.clone()));
        }
        let mut arguments = self.arguments.clone();
        for (id, arg) in arguments.iter_mut() {
            let score = *scores
                .get(id)
                .ok_or_else(|| Error::MissingBaseScore(id.clone()))?;
            check_score(id, score)?;
            arg.base_score = score;
        }
        Ok(Qbaf {
            arguments,
            edges: self.edges.clone(),
            links: self.links.clone(),
        })
    }

    /// Copy of the framework with a single base score changed.
    pub fn with_base_score(&self, id: &str, score: f64) -> Result<Qbaf> {
        let mut scores: HashMap<ArgumentId, f64> = self
            .arguments
            .iter()
            .map(|(k, a)| (k.clone(), a.base_score))
            .collect();
        let key = self.id_at(self.index_of(id)?).clone();
        scores.insert(key, score);
        self.override_base_scores(&scores)
    }

    /// Outgoing edges of `id`, in framework order.
    pub fn outgoing(&self, id: &str) -> Result<Vec<EdgeId>> {
        let index = self.index_of(id)?;
        Ok(self
            .links
            .iter()
            .enumerate()
            .filter(|(_, l)| l.source == index)
            .map(|(i, _)| EdgeId(i))
            .collect())
    }

    /// Incoming edges of `id`, in framework order.
    pub fn incoming(&self, id: &str) -> Result<Vec<EdgeId>> {
        let index = self.index_of(id)?;
        Ok(self
            .links
            .iter()
            .enumerate()
            .filter(|(_, l)| l.target == index)
            .map(|(i, _)| EdgeId(i))
            .collect())
    }

    pub fn full_subset(&self) -> EdgeSubset {
        EdgeSubset::from_indices(0..self.edges.len())
    }
}

/// Equality is set equality: argument order and edge order do not matter.
impl PartialEq for Qbaf {
    fn eq(&self, other: &Self) -> bool {
        if self.arguments.len() != other.arguments.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        let same_args = self
            .arguments
            .iter()
            .all(|(id, a)| other.arguments.get(id) == Some(a));
        let mine: HashSet<&Edge> = self.edges.iter().collect();
        same_args && other.edges.iter().all(|e| mine.contains(e))
    }
}

fn check_score(id: &ArgumentId, score: f64) -> Result<()> {
    if (0.0..=1.0).contains(&score) {
        Ok(())
    } else {
        Err(Error::BaseScoreOutOfRange {
            argument: id.clone(),
            score,
        })
    }
}

#[derive(Debug, Default)]
pub struct QbafBuilder {
    arguments: Vec<(ArgumentId, Argument)>,
    edges: Vec<Edge>,
}

impl QbafBuilder {
    pub fn argument(self, id: impl Into<ArgumentId>, base_score: f64) -> Self {
        self.labelled_argument(id, base_score, None)
    }

    pub fn labelled_argument(
        mut self,
        id: impl Into<ArgumentId>,
        base_score: f64,
        label: Option<String>,
    ) -> Self {
        self.arguments
            .push((id.into(), Argument { base_score, label }));
        self
    }

    pub fn attack(self, source: impl Into<ArgumentId>, target: impl Into<ArgumentId>) -> Self {
        self.edge(Edge::attack(source, target))
    }

    pub fn support(self, source: impl Into<ArgumentId>, target: impl Into<ArgumentId>) -> Self {
        self.edge(Edge::support(source, target))
    }

    pub fn edge(mut self, edge: Edge) -> Self {
        self.edges.push(edge);
        self
    }

    pub fn build(self) -> Result<Qbaf> {
        let mut arguments = IndexMap::with_capacity(self.arguments.len());
        for (id, arg) in self.arguments {
            if arguments.contains_key(&id) {
                return Err(Error::DuplicateArgument(id));
            }
            arguments.insert(id, arg);
        }
        Qbaf::from_parts(arguments, self.edges)
    }
}

/// A subset of a framework's edges, identified by edge index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeSubset {
    members: BTreeSet<usize>,
}

impl EdgeSubset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            members: indices.into_iter().collect(),
        }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = EdgeId>) -> Self {
        Self::from_indices(ids.into_iter().map(|id| id.0))
    }

    /// Subset of `q` holding the given edges; fails on an edge `q` lacks.
    pub fn from_edges<'a>(q: &Qbaf, edges: impl IntoIterator<Item = &'a Edge>) -> Result<Self> {
        let mut members = BTreeSet::new();
        for edge in edges {
            let id = q
                .edge_id(edge)
                .ok_or_else(|| Error::UnknownEdge(edge.clone()))?;
            members.insert(id.0);
        }
        Ok(Self { members })
    }

    /// Decodes bit `i` of `mask` as membership of edge `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self::from_indices((0..len).filter(|i| mask >> i & 1 == 1))
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.members.contains(&id.0)
    }

    pub fn insert(&mut self, id: EdgeId) -> bool {
        self.members.insert(id.0)
    }

    pub fn remove(&mut self, id: EdgeId) -> bool {
        self.members.remove(&id.0)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members.iter().map(|&i| EdgeId(i))
    }

    pub fn intersection(&self, other: &EdgeSubset) -> EdgeSubset {
        Self {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> Qbaf {
        Qbaf::builder()
            .argument("alpha", 0.5)
            .argument("beta", 0.5)
            .argument("gamma", 0.5)
            .argument("delta", 0.5)
            .argument("zeta", 0.5)
            .support("beta", "alpha")
            .support("gamma", "alpha")
            .attack("delta", "beta")
            .attack("delta", "gamma")
            .attack("zeta", "delta")
            .build()
            .unwrap()
    }

    #[test]
    fn restrict_drops_edges_outside_subset() {
        let q = fig2();
        let r = q.restrict(&EdgeSubset::from_indices([0, 2, 4])).unwrap();
        assert_eq!(r.num_edges(), 3);
        assert_eq!(r.num_arguments(), 5);
        assert!(r.find_edge("gamma", "alpha").is_none());
        assert!(r.find_edge("delta", "gamma").is_none());
        assert_eq!(r.edges()[1], Edge::attack("delta", "beta"));
    }

    #[test]
    fn restrict_identity_and_empty() {
        let q = fig2();
        assert_eq!(q.restrict(&q.full_subset()).unwrap(), q);
        let empty = q.restrict(&EdgeSubset::empty()).unwrap();
        assert_eq!(empty.num_edges(), 0);
        assert_eq!(empty.base_score("zeta"), Some(0.5));
    }

    #[test]
    fn restrict_rejects_foreign_index() {
        let q = fig2();
        let err = q.restrict(&EdgeSubset::from_indices([7])).unwrap_err();
        assert!(matches!(err, Error::InvalidSubset { index: 7, len: 5 }));
        let err = EdgeSubset::from_edges(&q, [&Edge::support("zeta", "alpha")]).unwrap_err();
        assert!(matches!(err, Error::UnknownEdge(_)));
    }

    #[test]
    fn restrict_composes() {
        let q = fig2();
        let s1 = EdgeSubset::from_indices([0, 1, 3, 4]);
        let s2 = EdgeSubset::from_indices([1, 2, 4]);
        let inner = q.restrict(&s1).unwrap();
        // s2 ∩ s1 expressed in the restricted framework's edge ids
        let s2_in_inner =
            EdgeSubset::from_edges(&inner, s2.intersection(&s1).iter().map(|id| q.edge(id)))
                .unwrap();
        assert_eq!(
            inner.restrict(&s2_in_inner).unwrap(),
            q.restrict(&s1.intersection(&s2)).unwrap()
        );
    }

    #[test]
    fn override_scores() {
        let q = fig2();
        let same: HashMap<ArgumentId, f64> = q
            .arguments()
            .map(|(k, a)| (k.clone(), a.base_score))
            .collect();
        assert_eq!(q.override_base_scores(&same).unwrap(), q);

        let q2 = q.with_base_score("beta", 1.0).unwrap();
        assert_eq!(q2.base_score("beta"), Some(1.0));
        assert_eq!(q2.base_score("alpha"), Some(0.5));
        assert_eq!(q2.with_base_score("beta", 1.0).unwrap(), q2);

        let err = q.with_base_score("beta", 1.2).unwrap_err();
        assert!(matches!(err, Error::BaseScoreOutOfRange { .. }));

        let mut partial = same.clone();
        partial.remove("gamma");
        assert!(matches!(
            q.override_base_scores(&partial),
            Err(Error::MissingBaseScore(_))
        ));
    }

    #[test]
    fn outgoing_edges() {
        let q = fig2();
        let out: Vec<_> = q
            .outgoing("delta")
            .unwrap()
            .into_iter()
            .map(|id| q.edge(id).clone())
            .collect();
        assert_eq!(
            out,
            vec![
                Edge::attack("delta", "beta"),
                Edge::attack("delta", "gamma")
            ]
        );
        assert_eq!(q.outgoing("zeta").unwrap(), vec![EdgeId(4)]);
        assert!(q.outgoing("alpha").unwrap().is_empty());
        assert!(matches!(q.outgoing("nope"), Err(Error::UnknownArgument(_))));
    }

    #[test]
    fn construction_rejects_invalid_frameworks() {
        let conflict = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .attack("a", "b")
            .support("a", "b")
            .build();
        assert!(matches!(conflict, Err(Error::PolarityConflict(..))));

        let dup = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .attack("a", "b")
            .attack("a", "b")
            .build();
        assert!(matches!(dup, Err(Error::DuplicateEdge(_))));

        let dangling = Qbaf::builder().argument("a", 0.5).attack("a", "x").build();
        assert!(matches!(dangling, Err(Error::UnknownArgument(_))));

        let dup_arg = Qbaf::builder()
            .argument("a", 0.5)
            .argument("a", 0.1)
            .build();
        assert!(matches!(dup_arg, Err(Error::DuplicateArgument(_))));

        let nan = Qbaf::builder().argument("a", f64::NAN).build();
        assert!(matches!(nan, Err(Error::BaseScoreOutOfRange { .. })));
    }

    #[test]
    fn opposite_directions_and_self_edges_are_allowed() {
        let q = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .attack("a", "b")
            .support("b", "a")
            .attack("a", "a")
            .build()
            .unwrap();
        assert_eq!(q.num_edges(), 3);
    }
}
