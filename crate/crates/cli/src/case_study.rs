//! Bundled end-to-end walkthroughs.

use anyhow::Result;

use qbaf::attribution::{classify_contribution, rae_approx, rae_exact};
use qbaf::datasets::{self, llm_edge, FRAUD_REFERENCE};
use qbaf::graph::paths_to_topic;
use qbaf::{evaluate, path_contribution, Contribution, ConvergenceConfig, Semantics};

use crate::output::{num, Table};

pub fn llm() -> Result<()> {
    let q = datasets::llm();
    let sem = Semantics::QuadraticEnergy;
    let cfg = ConvergenceConfig::default();
    let s = evaluate(&q, sem, &cfg);
    let map = rae_exact(&q, sem, "alpha", &cfg)?;

    println!("language-learning framework, topic alpha, {sem}");
    let mut t = Table::new(["argument", "base", "strength"]);
    for (id, a) in q.arguments() {
        t.row([id.to_string(), num(a.base_score), num(s[id.as_str()])]);
    }
    print!("{}", t.render());
    println!();

    let mut t = Table::new(["edge", "name", "phi"]);
    for r in 1..=5 {
        let id = q.edge_id(&llm_edge(r)).expect("bundled edge");
        t.row([q.edge(id).to_string(), format!("r{r}"), num(map.phi(id))]);
    }
    print!("{}", t.render());
    println!(
        "sum of phi {} = sigma - tau {}",
        num(map.sum()),
        num(s["alpha"] - 0.8)
    );
    println!();

    let r4 = q.edge_id(&llm_edge(4)).expect("bundled edge");
    let r5 = q.edge_id(&llm_edge(5)).expect("bundled edge");
    println!("paths from beta to alpha:");
    for id in [r5, r4] {
        for p in paths_to_topic(&q, id, "alpha")? {
            println!(
                "  {}  sum of phi {}",
                p.display(&q),
                num(path_contribution(&map, &p)?)
            );
        }
    }
    println!();

    let r1 = q.edge_id(&llm_edge(1)).expect("bundled edge");
    let mut rest = q.full_subset();
    rest.remove(r1);
    let without = evaluate(&q.restrict(&rest)?, sem, &cfg);
    println!("strength of alpha without r1: {}", num(without["alpha"]));

    let raised = q.with_base_score("gamma", 0.95)?;
    let raised_map = rae_exact(&raised, sem, "alpha", &cfg)?;
    let r3 = q.edge_id(&llm_edge(3)).expect("bundled edge");
    println!(
        "with tau(gamma) = 0.95: phi(r1) {} (was {}), phi(r3) {} (was {})",
        num(raised_map.phi(r1)),
        num(map.phi(r1)),
        num(raised_map.phi(r3)),
        num(map.phi(r3)),
    );
    Ok(())
}

pub fn fraud(samples: usize, seed: u64) -> Result<()> {
    let q = datasets::fraud();
    let sem = Semantics::DfQuad;
    let cfg = ConvergenceConfig::default();
    let s = evaluate(&q, sem, &cfg);
    println!(
        "fraud-detection framework: {} arguments, {} edges, topic 1, {sem}",
        q.num_arguments(),
        q.num_edges()
    );
    println!("strength of 1: {}", num(s["1"]));
    println!("Monte Carlo attribution: {samples} samples per edge, seed {seed}");

    let map = rae_approx(&q, sem, "1", samples, seed, &cfg)?;
    let mut rows: Vec<_> = FRAUD_REFERENCE
        .iter()
        .map(|&(src, tgt, _, reference)| {
            let id = q.find_edge(src, tgt).expect("bundled edge");
            (id, reference)
        })
        .collect();
    rows.sort_by(|a, b| map.phi(b.0).abs().total_cmp(&map.phi(a.0).abs()));

    let mut agree = 0;
    let mut t = Table::new(["edge", "phi", "std_err", "reference", "sign"]);
    for &(id, reference) in &rows {
        let e = &map.entries[id.0];
        let ours = classify_contribution(e.phi, 0.0);
        let same = ours == classify_contribution(reference, 0.0);
        let within_noise = e.phi.abs() <= 2.0 * e.std_error;
        if same {
            agree += 1;
        }
        let mark = match (same, within_noise) {
            (true, _) => "agrees",
            (false, true) => "differs (within 2 SE)",
            (false, false) => "differs",
        };
        t.row([
            e.edge.to_string(),
            num(e.phi),
            num(e.std_error),
            num(reference),
            mark.to_string(),
        ]);
    }
    print!("{}", t.render());
    println!("sign agreement with reference: {agree}/{}", rows.len());

    let top: Vec<String> = rows
        .iter()
        .take(3)
        .map(|&(id, _)| q.edge(id).to_string())
        .collect();
    println!("largest |phi|: {}", top.join(", "));
    let negative = rows
        .iter()
        .filter(|&&(id, _)| map.contribution(id, None) == Contribution::Negative)
        .count();
    println!("edges lowering the topic's strength (outside 2 SE): {negative}");
    if map.failed_samples() > 0 {
        println!("failed samples: {}", map.failed_samples());
    }
    Ok(())
}
