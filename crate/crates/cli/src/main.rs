mod case_study;
mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qbaf::attribution::{rae_approx, rae_exact, AttributionMap, Method};
use qbaf::datasets;
use qbaf::experiments::{
    benchmark_runtime, generate, trace_convergence, write_bench_csv, BaseScoreDistribution,
    BenchPlan, GenSpec,
};
use qbaf::graph::{classify_all, paths_to_topic_with, DEFAULT_PATH_CAP};
use qbaf::properties::{
    check_framework, check_monotonicity, check_stability, CheckOptions, PropertyId,
};
use qbaf::{evaluate, ConvergenceConfig, Error, Qbaf, Semantics};

use output::{num, Table};

const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_INVALID_INPUT: u8 = 4;

/// Evaluate and explain quantitative bipolar argumentation frameworks.
///
/// FILE arguments accept a JSON framework document, `-` for standard input,
/// or `builtin:NAME` for a bundled dataset (fig1, fig2, llm, fraud).
#[derive(Debug, Parser)]
#[command(name = "qbaf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Final strength of every argument.
    Evaluate {
        file: String,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Attribution of every edge towards a topic argument.
    Explain {
        file: String,
        #[arg(long)]
        topic: String,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Neutrality band; defaults to 1e-9 for exact values and twice the
        /// standard error for estimates.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Direct, indirect, multifold or disconnected, for every edge.
    Classify {
        file: String,
        #[arg(long)]
        topic: String,
        #[arg(long)]
        json: bool,
    },
    /// Run property checks.
    Check {
        file: String,
        #[arg(long)]
        topic: String,
        #[command(flatten)]
        sem: SemanticsArgs,
        /// Comma-separated property names, or `all`.
        #[arg(long, default_value = "all")]
        properties: String,
        /// Random trials for monotonicity and stability.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Graphviz rendering coloured by attribution.
    ExportDot {
        file: String,
        #[arg(long)]
        topic: String,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a random framework.
    Gen {
        #[arg(long = "args")]
        arguments: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long)]
        cyclic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        support_fraction: f64,
        /// Give every argument this base score instead of uniform draws.
        #[arg(long)]
        constant_score: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time marginal-contribution draws for the specs in a plan file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Running Monte Carlo estimates at fixed sample intervals.
    Trace {
        file: String,
        #[arg(long)]
        topic: String,
        #[command(flatten)]
        sem: SemanticsArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        stride: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Successive-difference threshold reported in the summary.
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a bundled case study end to end.
    CaseStudy {
        #[arg(value_enum)]
        name: CaseStudy,
        /// Monte Carlo samples per edge (fraud only).
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseStudy {
    Fraud,
    Llm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SemanticsName {
    Dfquad,
    Qe,
    Reb,
}

impl From<SemanticsName> for Semantics {
    fn from(s: SemanticsName) -> Self {
        match s {
            SemanticsName::Dfquad => Semantics::DfQuad,
            SemanticsName::Qe => Semantics::QuadraticEnergy,
            SemanticsName::Reb => Semantics::RestrictedEuler,
        }
    }
}

#[derive(Debug, Args)]
struct SemanticsArgs {
    #[arg(long, value_enum)]
    semantics: SemanticsName,
    /// Convergence tolerance for cyclic frameworks.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

impl SemanticsArgs {
    fn semantics(&self) -> Semantics {
        self.semantics.into()
    }

    fn config(&self) -> Result<ConvergenceConfig> {
        Ok(ConvergenceConfig::new(self.tolerance, self.max_iter)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Exact,
    Approx,
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodName,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure that maps to a specific exit status.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit status {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(Exit(code)) = err.downcast_ref::<Exit>() {
                return ExitCode::from(*code);
            }
            eprintln!("qbaf: error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let Some(e) = err.chain().find_map(|c| c.downcast_ref::<Error>()) else {
        return 1;
    };
    match e {
        Error::NotWellDefined { .. } | Error::TooManyFailedSamples { .. } => EXIT_NO_CONVERGENCE,
        Error::UnknownArgument(_)
        | Error::ExactCapExceeded { .. }
        | Error::InvalidConvergenceConfig(_)
        | Error::NoSamples => EXIT_USAGE,
        Error::Syntax { .. }
        | Error::InvalidField { .. }
        | Error::DuplicateArgument(_)
        | Error::BaseScoreOutOfRange { .. }
        | Error::DuplicateEdge(_)
        | Error::PolarityConflict(..)
        | Error::InfeasibleSpec(_)
        | Error::Io(_) => EXIT_INVALID_INPUT,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate { file, sem, json } => cmd_evaluate(&file, &sem, json),
        Command::Explain {
            file,
            topic,
            sem,
            method,
            epsilon,
            json,
        } => cmd_explain(&file, &topic, &sem, &method, epsilon, json),
        Command::Classify { file, topic, json } => cmd_classify(&file, &topic, json),
        Command::Check {
            file,
            topic,
            sem,
            properties,
            trials,
            seed,
            json,
        } => cmd_check(&file, &topic, &sem, &properties, trials, seed, json),
        Command::ExportDot {
            file,
            topic,
            sem,
            method,
            epsilon,
            out,
        } => {
            let q = load(&file)?;
            let map = attribute(&q, &topic, &sem, &method)?;
            let dot = qbaf::export_dot(&q, &map, epsilon)?;
            write_output(&out, dot.as_bytes())
        }
        Command::Gen {
            arguments,
            edges,
            cyclic,
            seed,
            support_fraction,
            constant_score,
            out,
        } => {
            let spec = GenSpec {
                support_fraction,
                base_scores: constant_score.map_or(
                    BaseScoreDistribution::Uniform01,
                    BaseScoreDistribution::Constant,
                ),
                ..GenSpec::new(arguments, edges, cyclic, seed)
            };
            let q = generate(&spec)?;
            let mut doc = qbaf::io::QbafDocument::from_qbaf(&q);
            doc.metadata
                .insert("generator".into(), serde_json::to_value(spec)?);
            write_output(&out, (doc.to_json() + "\n").as_bytes())
        }
        Command::Bench { spec, out } => cmd_bench(&spec, &out),
        Command::Trace {
            file,
            topic,
            sem,
            samples,
            stride,
            seed,
            threshold,
            out,
        } => cmd_trace(&file, &topic, &sem, samples, stride, seed, threshold, &out),
        Command::CaseStudy {
            name: CaseStudy::Fraud,
            samples,
            seed,
        } => case_study::fraud(samples, seed),
        Command::CaseStudy {
            name: CaseStudy::Llm,
            ..
        } => case_study::llm(),
    }
}

fn load(file: &str) -> Result<Qbaf> {
    if let Some(name) = file.strip_prefix("builtin:") {
        return datasets::by_name(name).with_context(|| {
            format!(
                "no bundled dataset `{name}` (available: {})",
                datasets::NAMES.join(", ")
            )
        });
    }
    let text = if file == "-" {
        io::read_to_string(io::stdin()).map_err(Error::from)?
    } else {
        fs::read_to_string(file)
            .map_err(Error::from)
            .with_context(|| format!("cannot read {file}"))?
    };
    qbaf::parse_qbaf(&text).with_context(|| format!("invalid framework in {file}"))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    if path == Path::new("-") {
        io::stdout().write_all(bytes)?;
        return Ok(());
    }
    fs::write(path, bytes)
        .map_err(Error::from)
        .with_context(|| format!("cannot write {}", path.display()))
}

fn attribute(
    q: &Qbaf,
    topic: &str,
    sem: &SemanticsArgs,
    method: &MethodArgs,
) -> Result<AttributionMap> {
    let cfg = sem.config()?;
    Ok(match method.method {
        MethodName::Exact => rae_exact(q, sem.semantics(), topic, &cfg)?,
        MethodName::Approx => {
            rae_approx(q, sem.semantics(), topic, method.samples, method.seed, &cfg)?
        }
    })
}

fn cmd_evaluate(file: &str, sem: &SemanticsArgs, json: bool) -> Result<()> {
    let q = load(file)?;
    let s = evaluate(&q, sem.semantics(), &sem.config()?);
    if json {
        println!("{}", serde_json::to_string_pretty(&s)?);
    } else {
        let mut t = Table::new(["argument", "base", "strength"]);
        for (id, arg) in q.arguments() {
            t.row([id.to_string(), num(arg.base_score), num(s[id.as_str()])]);
        }
        print!("{}", t.render());
        println!(
            "{} after {} sweep(s), residual {}",
            if s.converged {
                "converged"
            } else {
                "did NOT converge"
            },
            s.iterations,
            num(s.residual)
        );
    }
    if !s.converged {
        eprintln!("qbaf: strengths did not converge; values are the last iterate");
        return Err(Exit(EXIT_NO_CONVERGENCE).into());
    }
    Ok(())
}

fn cmd_explain(
    file: &str,
    topic: &str,
    sem: &SemanticsArgs,
    method: &MethodArgs,
    epsilon: Option<f64>,
    json: bool,
) -> Result<()> {
    let q = load(file)?;
    let map = attribute(&q, topic, sem, method)?;
    let classes = classify_all(&q, topic)?;
    let strength = evaluate(&q, sem.semantics(), &sem.config()?);

    if json {
        let rows: Vec<_> = q
            .edge_ids()
            .map(|id| {
                let e = &map.entries[id.0];
                serde_json::json!({
                    "edge": e.edge,
                    "phi": e.phi,
                    "std_error": e.std_error,
                    "failed_samples": e.failed_samples,
                    "contribution": map.contribution(id, epsilon),
                    "class": classes.edges[id.0].class,
                    "prediction": classes.edges[id.0].prediction,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "topic": map.topic,
            "semantics": map.semantics,
            "method": map.method,
            "base_score": q.base_score(topic),
            "strength": strength.get(topic),
            "sum_phi": map.sum(),
            "cyclic": classes.cyclic,
            "edges": rows,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }

    let approx = matches!(map.method, Method::MonteCarlo { .. });
    let mut header = vec!["edge", "phi"];
    if approx {
        header.push("std_err");
    }
    header.extend(["contribution", "class", "predicted"]);
    let mut t = Table::new(header);
    for id in q.edge_ids() {
        let e = &map.entries[id.0];
        let mut row = vec![e.edge.to_string(), num(e.phi)];
        if approx {
            row.push(num(e.std_error));
        }
        row.push(map.contribution(id, epsilon).to_string());
        row.push(classes.edges[id.0].class.to_string());
        row.push(classes.edges[id.0].prediction.to_string());
        t.row(row);
    }
    print!("{}", t.render());
    let tau = q.base_score(topic).expect("topic exists");
    println!(
        "topic {topic} ({}): base {}, strength {}, sum of phi {}",
        map.semantics,
        num(tau),
        num(strength[topic]),
        num(map.sum())
    );
    if classes.cyclic {
        println!("note: the framework is cyclic; sign predictions are heuristic");
    }
    Ok(())
}

fn cmd_classify(file: &str, topic: &str, json: bool) -> Result<()> {
    let q = load(file)?;
    let report = classify_all(&q, topic)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    let mut t = Table::new(["edge", "class", "paths", "predicted"]);
    for (id, r) in q.edge_ids().zip(&report.edges) {
        let paths = paths_to_topic_with(&q, id, topic, DEFAULT_PATH_CAP)?;
        let count = if paths.truncated {
            format!(">={}", paths.paths.len())
        } else {
            paths.paths.len().to_string()
        };
        t.row([
            r.edge.to_string(),
            r.class.to_string(),
            count,
            r.prediction.to_string(),
        ]);
    }
    print!("{}", t.render());
    if report.cyclic {
        println!("note: the framework is cyclic; only simple paths are counted");
    }
    Ok(())
}

fn parse_properties(list: &str) -> Result<Vec<PropertyId>> {
    if list.trim() == "all" {
        return Ok(PropertyId::ALL.to_vec());
    }
    list.split(',')
        .map(|s| s.trim().parse::<PropertyId>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow::Error::new(UsageError(e)))
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    file: &str,
    topic: &str,
    sem: &SemanticsArgs,
    properties: &str,
    trials: usize,
    seed: u64,
    json: bool,
) -> Result<()> {
    let properties = match parse_properties(properties) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("qbaf: error: {e}");
            return Err(Exit(EXIT_USAGE).into());
        }
    };
    let q = load(file)?;
    let opts = CheckOptions {
        config: sem.config()?,
        ..CheckOptions::default()
    };
    let mut reports = check_framework(&q, sem.semantics(), topic, &properties, &opts)?;
    if properties.contains(&PropertyId::Monotonicity) {
        reports.push(check_monotonicity(sem.semantics(), trials, seed, &opts)?);
    }
    if properties.contains(&PropertyId::Stability) {
        reports.push(check_stability(sem.semantics(), trials, seed, &opts)?);
    }

    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
        return Ok(());
    }
    let mut t = Table::new(["property", "edges", "verdict", "guaranteed", "detail"]);
    for r in &reports {
        let edges: Vec<String> = r.edges.iter().map(|e| e.to_string()).collect();
        t.row([
            r.property.to_string(),
            edges.join(" "),
            r.verdict.to_string(),
            if r.guaranteed { "yes" } else { "no" }.to_string(),
            r.detail.clone(),
        ]);
    }
    print!("{}", t.render());
    let violated = reports.iter().filter(|r| r.is_violated()).count();
    let unexpected = reports
        .iter()
        .filter(|r| r.is_unexpected_violation())
        .count();
    println!(
        "{} reports, {violated} violated ({unexpected} where the property is guaranteed)",
        reports.len()
    );
    Ok(())
}

fn cmd_bench(spec: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(spec)
        .map_err(Error::from)
        .with_context(|| format!("cannot read {}", spec.display()))?;
    let plan: BenchPlan = serde_json::from_str(&text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let rows = benchmark_runtime(
        &plan.specs,
        plan.semantics,
        plan.repetitions,
        &ConvergenceConfig::default(),
    )?;
    let mut buf = Vec::new();
    write_bench_csv(&rows, &mut buf)?;
    write_output(out, &buf)?;
    let mut t = Table::new(["arguments", "edges", "cyclic", "mean ms", "failed"]);
    for r in &rows {
        t.row([
            r.num_arguments.to_string(),
            r.num_edges.to_string(),
            r.cyclic.to_string(),
            num(r.mean_ms),
            r.failed.to_string(),
        ]);
    }
    print!("{}", t.render());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    file: &str,
    topic: &str,
    sem: &SemanticsArgs,
    samples: usize,
    stride: usize,
    seed: u64,
    threshold: f64,
    out: &Path,
) -> Result<()> {
    let q = load(file)?;
    let trace = trace_convergence(
        &q,
        sem.semantics(),
        topic,
        samples,
        stride,
        seed,
        &sem.config()?,
    )?;
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    write_output(out, &buf)?;
    let mut t = Table::new(["edge", "estimate", "settled at"]);
    for e in &trace.edges {
        t.row([
            e.edge.to_string(),
            e.final_estimate().map_or("-".into(), num),
            e.settled_at(threshold)
                .map_or("-".into(), |s| s.to_string()),
        ]);
    }
    print!("{}", t.render());
    match trace.settled_at(threshold) {
        Some(s) => println!(
            "all successive differences below {} from sample {s}",
            num(threshold)
        ),
        None => println!("some estimates never settled below {}", num(threshold)),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn property_lists() {
        assert_eq!(
            parse_properties("all").unwrap().len(),
            PropertyId::ALL.len()
        );
        assert_eq!(
            parse_properties("efficiency, dummy").unwrap(),
            vec![PropertyId::Efficiency, PropertyId::Dummy]
        );
        assert!(parse_properties("efficiency,bogus").is_err());
    }

    #[test]
    fn exit_codes() {
        let code = |e: Error| exit_code(&anyhow::Error::new(e));
        assert_eq!(code(Error::UnknownArgument("x".into())), EXIT_USAGE);
        assert_eq!(code(Error::NoSamples), EXIT_USAGE);
        assert_eq!(
            code(Error::NotWellDefined {
                subset: vec![],
                residual: 1.0,
                iterations: 3
            }),
            EXIT_NO_CONVERGENCE
        );
        assert_eq!(code(Error::InfeasibleSpec("x".into())), EXIT_INVALID_INPUT);
    }
}
