//! Command-line front end for the model checker.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use kmc::{
    build_state_graph, check, check_all, counterexample, format_model, parse_model,
    render_state, scenario, CheckOutcome, Model, RunReport, StateGraph, TraceError,
    DEFAULT_STATE_LIMIT,
};

/// Explicit-state CTL model checker for synchronized multi-agent models.
#[derive(Parser)]
#[command(name = "kmc", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a model, build its state graph, and check its formulas.
    Check {
        /// Model file.
        file: PathBuf,
        /// Emit the report as a single JSON document.
        #[arg(long)]
        json: bool,
        /// Maximum number of states to explore.
        #[arg(long)]
        limit: Option<usize>,
        /// Check only the named formula (repeatable).
        #[arg(long = "formula", value_name = "NAME")]
        formulas: Vec<String>,
    },
    /// Build the state graph and print its size.
    Reach {
        /// Model file.
        file: PathBuf,
        /// Emit the counts as a single JSON document.
        #[arg(long)]
        json: bool,
        /// Maximum number of states to explore.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Print a counterexample trace for a failing formula.
    Explain {
        /// Model file.
        file: PathBuf,
        /// Formula to explain.
        #[arg(long, value_name = "NAME")]
        formula: String,
        /// Maximum number of states to explore.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Reformat a model file canonically to standard output.
    Fmt {
        /// Model file.
        file: PathBuf,
    },
    /// Print the bundled surveillance scenario model.
    Scenario,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Check { file, json, limit, formulas } => cmd_check(&file, json, limit, &formulas),
        Cmd::Reach { file, json, limit } => cmd_reach(&file, json, limit),
        Cmd::Explain { file, formula, limit } => cmd_explain(&file, &formula, limit),
        Cmd::Fmt { file } => cmd_fmt(&file),
        Cmd::Scenario => {
            let def = scenario::build_usv_model(&scenario::ScenarioConfig::default());
            print!("{}", format_model(&def));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Resolves the state limit: `--limit` wins, then `KMC_STATE_LIMIT`,
/// then the built-in default.
fn state_limit(flag: Option<usize>) -> Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("KMC_STATE_LIMIT") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("KMC_STATE_LIMIT must be a non-negative integer, got {raw:?}")),
        Err(_) => Ok(DEFAULT_STATE_LIMIT),
    }
}

fn load(path: &PathBuf) -> Result<Model, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let def = parse_model(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Model::compile(def).map_err(|e| format!("{}: {e}", path.display()))
}

fn build(model: &Model, limit: Option<usize>) -> Result<(StateGraph, u64), String> {
    let limit = state_limit(limit)?;
    let started = Instant::now();
    let graph = build_state_graph(model, limit).map_err(|e| e.to_string())?;
    Ok((graph, started.elapsed().as_millis() as u64))
}

fn cmd_check(
    path: &PathBuf,
    json: bool,
    limit: Option<usize>,
    selected: &[String],
) -> Result<ExitCode, String> {
    let model = load(path)?;
    let (graph, build_ms) = build(&model, limit)?;
    let outcomes: Vec<CheckOutcome> = if selected.is_empty() {
        check_all(&model, &graph)
    } else {
        let mut picked = Vec::with_capacity(selected.len());
        for name in selected {
            let def = model
                .formula(name)
                .ok_or_else(|| format!("no formula named {name} in {}", path.display()))?;
            picked.push(check(&model, &graph, name, &def.body).map_err(|e| e.to_string())?);
        }
        picked
    };
    let report = RunReport::new(path.display().to_string(), &model, &graph, build_ms, &outcomes);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    } else {
        println!("model: {}", report.path);
        println!("states: {}", report.states);
        println!("edges: {}", report.edges);
        println!("build: {} ms", report.build_ms);
        let width = report.formulas.iter().map(|f| f.name.len()).max().unwrap_or(0);
        for f in &report.formulas {
            let verdict = if f.verdict { "TRUE " } else { "FALSE" };
            let hint = match (&f.trace, f.verdict) {
                (Some(_), false) => "  [counterexample: run explain]",
                _ => "",
            };
            println!("{:width$}  {verdict}  (sat {}){hint}", f.name, f.sat_count);
        }
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn cmd_reach(path: &PathBuf, json: bool, limit: Option<usize>) -> Result<ExitCode, String> {
    let model = load(path)?;
    let (graph, build_ms) = build(&model, limit)?;
    let report = RunReport::new(path.display().to_string(), &model, &graph, build_ms, &[]);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    } else {
        println!("model: {}", report.path);
        println!("states: {}", report.states);
        println!("edges: {}", report.edges);
        println!("build: {} ms", report.build_ms);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_explain(path: &PathBuf, name: &str, limit: Option<usize>) -> Result<ExitCode, String> {
    let model = load(path)?;
    let def = model
        .formula(name)
        .ok_or_else(|| format!("no formula named {name} in {}", path.display()))?
        .clone();
    let (graph, _) = build(&model, limit)?;
    match counterexample(&model, &graph, &def.body) {
        Ok(trace) => {
            println!(
                "counterexample for {name} ({} steps, violation at step {}):",
                trace.states.len(),
                trace.violating_step
            );
            let mut previous: Option<kmc::StateRecord> = None;
            for (step, &id) in trace.states.iter().enumerate() {
                let record = render_state(&model, &graph, id);
                let shown: Vec<String> = record
                    .iter()
                    .filter(|(key, value)| match &previous {
                        // After the first step, show only what changed.
                        Some(prev) => prev.get(*key) != Some(*value),
                        None => true,
                    })
                    .map(|(key, value)| format!("{key} = {}", plain(value)))
                    .collect();
                let marker = if step == trace.violating_step { "  <- violation" } else { "" };
                let body = if shown.is_empty() { "(unchanged)".to_string() } else { shown.join(", ") };
                println!("  step {step}: {body}{marker}");
                previous = Some(record);
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(TraceError::Holds) => {
            println!("{name} holds: no counterexample");
            Ok(ExitCode::SUCCESS)
        }
        Err(TraceError::Unsupported) => {
            println!("{name}: unsupported fragment (traces cover AG over state predicates and AX steps)");
            Ok(ExitCode::SUCCESS)
        }
        Err(TraceError::Invalid(e)) => Err(e.to_string()),
    }
}

fn cmd_fmt(path: &PathBuf) -> Result<ExitCode, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let def = parse_model(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    print!("{}", format_model(&def));
    Ok(ExitCode::SUCCESS)
}

/// Strips JSON quoting for human-readable trace output.
fn plain(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
