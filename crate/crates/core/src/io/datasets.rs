//! Bundled case-study frameworks.

use crate::io::document::parse_qbaf;
use crate::model::{Edge, Polarity, Qbaf};

pub const FIG1_JSON: &str = include_str!("../../data/fig1.json");
pub const FIG2_JSON: &str = include_str!("../../data/fig2.json");
pub const LLM_JSON: &str = include_str!("../../data/llm.json");
pub const FRAUD_JSON: &str = include_str!("../../data/fraud.json");

/// Movie-review framework: topic `alpha`, DF-QuAD.
pub fn fig1() -> Qbaf {
    parse_qbaf(FIG1_JSON).expect("bundled dataset")
}

/// Five-edge framework with every base score at 0.5: topic `alpha`, DF-QuAD.
pub fn fig2() -> Qbaf {
    parse_qbaf(FIG2_JSON).expect("bundled dataset")
}

/// Language-learning framework: topic `alpha`, QE.
pub fn llm() -> Qbaf {
    parse_qbaf(LLM_JSON).expect("bundled dataset")
}

/// Fraud-detection framework (48 arguments, 47 edges): topic `1`, DF-QuAD.
pub fn fraud() -> Qbaf {
    parse_qbaf(FRAUD_JSON).expect("bundled dataset")
}

pub const NAMES: [&str; 4] = ["fig1", "fig2", "llm", "fraud"];

pub fn by_name(name: &str) -> Option<Qbaf> {
    match name {
        "fig1" => Some(fig1()),
        "fig2" => Some(fig2()),
        "llm" => Some(llm()),
        "fraud" => Some(fraud()),
        _ => None,
    }
}

/// Edges `r1`..`r5` of the five-edge framework.
pub fn fig2_edge(r: usize) -> Edge {
    match r {
        1 => Edge::support("beta", "alpha"),
        2 => Edge::support("gamma", "alpha"),
        3 => Edge::attack("delta", "beta"),
        4 => Edge::attack("delta", "gamma"),
        5 => Edge::attack("zeta", "delta"),
        _ => panic!("no edge r{r}"),
    }
}

/// Edges `r1`..`r7` of the movie-review framework.
pub fn fig1_edge(r: usize) -> Edge {
    match r {
        1 => Edge::support("beta", "gamma"),
        2 => Edge::support("gamma", "alpha"),
        3 => Edge::support("beta", "delta"),
        4 => Edge::attack("delta", "xi"),
        5 => Edge::attack("xi", "alpha"),
        6 => Edge::attack("beta", "eta"),
        7 => Edge::support("eta", "alpha"),
        _ => panic!("no edge r{r}"),
    }
}

/// Edges `r1`..`r5` of the language-learning framework.
pub fn llm_edge(r: usize) -> Edge {
    match r {
        1 => Edge::support("gamma", "alpha"),
        2 => Edge::support("delta", "alpha"),
        3 => Edge::support("gamma", "delta"),
        4 => Edge::attack("beta", "delta"),
        5 => Edge::attack("beta", "alpha"),
        _ => panic!("no edge r{r}"),
    }
}

/// Published Monte Carlo attributions for the fraud framework
/// (source, target, polarity, value), in ascending order of value.
pub const FRAUD_REFERENCE: &[(&str, &str, Polarity, f64)] = &[
    ("3", "1", Polarity::Attack, -4.55E-01),
    ("5", "2", Polarity::Attack, -9.13E-02),
    ("16", "5", Polarity::Support, -1.75E-02),
    ("8", "3", Polarity::Support, -1.64E-02),
    ("7", "3", Polarity::Support, -1.59E-02),
    ("11", "3", Polarity::Support, -1.51E-02),
    ("6", "3", Polarity::Support, -1.51E-02),
    ("10", "3", Polarity::Support, -1.46E-02),
    ("9", "3", Polarity::Support, -1.32E-02),
    ("15", "5", Polarity::Support, -1.23E-02),
    ("24", "16", Polarity::Support, -2.89E-03),
    ("22", "15", Polarity::Support, -2.31E-03),
    ("23", "16", Polarity::Support, -1.60E-03),
    ("34", "23", Polarity::Support, -4.74E-04),
    ("35", "24", Polarity::Support, -3.62E-04),
    ("36", "24", Polarity::Support, -3.52E-04),
    ("44", "32", Polarity::Attack, -5.82E-05),
    ("43", "32", Polarity::Attack, -4.06E-05),
    ("37", "25", Polarity::Support, 1.60E-05),
    ("42", "26", Polarity::Support, 2.31E-05),
    ("38", "25", Polarity::Support, 2.56E-05),
    ("40", "26", Polarity::Support, 2.78E-05),
    ("45", "32", Polarity::Support, 2.79E-05),
    ("47", "33", Polarity::Support, 3.09E-05),
    ("39", "25", Polarity::Support, 3.49E-05),
    ("41", "26", Polarity::Support, 3.79E-05),
    ("46", "32", Polarity::Support, 6.24E-05),
    ("48", "33", Polarity::Support, 6.71E-05),
    ("30", "20", Polarity::Support, 1.40E-04),
    ("31", "20", Polarity::Support, 1.47E-04),
    ("28", "19", Polarity::Support, 1.49E-04),
    ("29", "20", Polarity::Support, 1.49E-04),
    ("27", "19", Polarity::Support, 2.12E-04),
    ("32", "21", Polarity::Support, 2.17E-04),
    ("25", "17", Polarity::Support, 2.98E-04),
    ("26", "18", Polarity::Support, 3.74E-04),
    ("33", "21", Polarity::Support, 4.95E-04),
    ("18", "12", Polarity::Support, 1.27E-03),
    ("19", "13", Polarity::Support, 1.38E-03),
    ("20", "13", Polarity::Support, 1.57E-03),
    ("17", "12", Polarity::Support, 1.73E-03),
    ("21", "14", Polarity::Support, 1.78E-03),
    ("14", "4", Polarity::Support, 8.41E-03),
    ("13", "4", Polarity::Support, 9.36E-03),
    ("12", "4", Polarity::Support, 9.59E-03),
    ("4", "2", Polarity::Support, 1.15E-01),
    ("2", "1", Polarity::Support, 2.60E-01),
];
