//! Graphviz rendering of an attribution.
//!
//! Edges are blue when they raise the topic's strength, red when they lower
//! it and gray when neutral. Pen width grows linearly with |phi| from 0.5 up
//! to 6.0 for the largest magnitude in the framework.

use std::fmt::Write;

use crate::attribution::{AttributionMap, Contribution};
use crate::error::Result;
use crate::model::{EdgeId, Qbaf};

pub const MIN_PEN_WIDTH: f64 = 0.5;
pub const MAX_PEN_WIDTH: f64 = 6.0;

pub fn pen_width(phi: f64, max_abs: f64) -> f64 {
    if max_abs > 0.0 {
        MIN_PEN_WIDTH + (MAX_PEN_WIDTH - MIN_PEN_WIDTH) * phi.abs() / max_abs
    } else {
        MIN_PEN_WIDTH
    }
}

pub fn color(contribution: Contribution) -> &'static str {
    match contribution {
        Contribution::Positive => "blue",
        Contribution::Negative => "red",
        Contribution::Neutral => "gray",
    }
}

/// Renders `q` with edges styled by `attribution`. `epsilon` overrides the
/// attribution's own neutrality band.
///
/// Output is byte-stable: arguments keep framework order and edges are
/// sorted by (source, target, polarity).
pub fn export_dot(q: &Qbaf, attribution: &AttributionMap, epsilon: Option<f64>) -> Result<String> {
    attribution.check_matches(q, attribution.topic.as_str())?;
    let max_abs = attribution
        .entries
        .iter()
        .map(|e| e.phi.abs())
        .fold(0.0, f64::max);

    let mut out = String::new();
    out.push_str("digraph qbaf {\n  rankdir=BT;\n  node [shape=ellipse];\n");
    for (id, arg) in q.arguments() {
        let mut label = id.to_string();
        if let Some(l) = &arg.label {
            let _ = write!(label, "\n{l}");
        }
        let _ = write!(label, "\ntau={}", arg.base_score);
        let style = if id == &attribution.topic {
            ", style=bold"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} [label={}{style}];",
            quote(id.as_str()),
            quote(&label)
        );
    }

    let mut order: Vec<EdgeId> = q.edge_ids().collect();
    order.sort_by(|&a, &b| q.edge(a).cmp(q.edge(b)));
    for id in order {
        let edge = q.edge(id);
        let entry = &attribution.entries[id.0];
        let class = attribution.contribution(id, epsilon);
        let width = match class {
            Contribution::Neutral => MIN_PEN_WIDTH,
            _ => pen_width(entry.phi, max_abs),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\", color={}, penwidth={:.3}, tooltip=\"phi={}\"];",
            quote(edge.source.as_str()),
            quote(edge.target.as_str()),
            edge.polarity.symbol(),
            color(class),
            width,
            entry.phi,
        );
    }
    out.push_str("}\n");
    Ok(out)
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}
