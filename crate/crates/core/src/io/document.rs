//! JSON document format for frameworks.
//!
//! ```json
//! {
//!   "metadata": { "name": "example" },
//!   "arguments": [
//!     { "id": "alpha", "base_score": 0.5, "label": "topic" },
//!     { "id": "beta" }
//!   ],
//!   "attacks": [],
//!   "supports": [["beta", "alpha"]]
//! }
//! ```
//!
//! Ids may be strings or integers. A missing `base_score` defaults to 0.5.
//! Edges keep document order, attacks first.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArgumentId, Edge, Polarity, Qbaf};

pub const DEFAULT_BASE_SCORE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QbafDocument {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub arguments: Vec<ArgumentEntry>,
    #[serde(default)]
    pub attacks: Vec<[Id; 2]>,
    #[serde(default)]
    pub supports: Vec<[Id; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentEntry {
    pub id: Id,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Argument id as written in a document: a string or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Id(pub String);

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Str(s) => Id(s),
            Raw::Int(i) => Id(i.to_string()),
        })
    }
}

impl From<&ArgumentId> for Id {
    fn from(id: &ArgumentId) -> Self {
        Id(id.as_str().to_owned())
    }
}

impl QbafDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_qbaf(q: &Qbaf) -> Self {
        let arguments = q
            .arguments()
            .map(|(id, a)| ArgumentEntry {
                id: id.into(),
                base_score: Some(a.base_score),
                label: a.label.clone(),
            })
            .collect();
        let pairs = |polarity| {
            q.edges()
                .iter()
                .filter(|e| e.polarity == polarity)
                .map(|e| [Id::from(&e.source), Id::from(&e.target)])
                .collect()
        };
        Self {
            metadata: BTreeMap::new(),
            arguments,
            attacks: pairs(Polarity::Attack),
            supports: pairs(Polarity::Support),
        }
    }

    /// Validates the document and builds the framework, reporting the
    /// offending field on failure.
    pub fn to_qbaf(&self) -> Result<Qbaf> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut builder = Qbaf::builder();
        for (i, entry) in self.arguments.iter().enumerate() {
            if let Some(first) = seen.insert(entry.id.0.as_str(), i) {
                return Err(field(
                    format!("arguments[{i}].id"),
                    format!(
                        "duplicate id `{}` (first defined at arguments[{first}])",
                        entry.id.0
                    ),
                ));
            }
            let score = entry.base_score.unwrap_or(DEFAULT_BASE_SCORE);
            if !(0.0..=1.0).contains(&score) {
                return Err(field(
                    format!("arguments[{i}].base_score"),
                    format!("{score} is outside [0, 1]"),
                ));
            }
            builder = builder.labelled_argument(entry.id.0.as_str(), score, entry.label.clone());
        }

        let mut pairs: HashMap<(&str, &str), String> = HashMap::new();
        for (name, list, polarity) in [
            ("attacks", &self.attacks, Polarity::Attack),
            ("supports", &self.supports, Polarity::Support),
        ] {
            for (i, [source, target]) in list.iter().enumerate() {
                let here = format!("{name}[{i}]");
                for end in [source, target] {
                    if !seen.contains_key(end.0.as_str()) {
                        return Err(field(here, format!("unknown argument `{}`", end.0)));
                    }
                }
                if let Some(prev) = pairs.insert((&source.0, &target.0), here.clone()) {
                    let message = if prev.starts_with(name) {
                        format!("duplicates {prev}")
                    } else {
                        format!("pair ({}, {}) is also listed in {prev}", source.0, target.0)
                    };
                    return Err(field(here, message));
                }
                builder = builder.edge(Edge {
                    source: source.0.as_str().into(),
                    target: target.0.as_str().into(),
                    polarity,
                });
            }
        }
        builder.build()
    }
}

fn field(field: String, message: String) -> Error {
    Error::InvalidField { field, message }
}

pub fn parse_qbaf(text: &str) -> Result<Qbaf> {
    QbafDocument::from_json(text)?.to_qbaf()
}

pub fn serialize_qbaf(q: &Qbaf) -> String {
    QbafDocument::from_qbaf(q).to_json()
}
