//! `disk-sssp`: solve, generate, verify and benchmark disk-graph instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use disk_sssp::bench::{append_csv, run_algo, run_suite, Algo, Suite};
use disk_sssp::exec::Execution;
use disk_sssp::generate::{default_seed, generate, GenKind, GeneratorSpec};
use disk_sssp::model::{validate_result, DiskInstance, EdgeCheck, SsspResult};
use disk_sssp::oracle::DEFAULT_VERTEX_CAP;
use serde_json::json;

const USAGE_ERROR: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "disk-sssp",
    version,
    about = "Exact shortest paths on disk intersection graphs"
)]
struct Cli {
    /// Run every solver on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and print `id dist prev` per vertex.
    Solve(SolveArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Run solvers and the oracle on one instance and compare them.
    Verify(VerifyArgs),
    /// Run a benchmark suite and append CSV records.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    algo: Algo,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of the line format.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    psi: f64,
    /// Defaults to `DISK_SSSP_SEED`, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    side: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "bounded,arbitrary")]
    algos: Vec<Algo>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    csv: PathBuf,
}

/// Failures that map to the usage exit code rather than 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a, exec),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a, exec),
        Command::Bench(a) => bench(a, exec),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(USAGE_ERROR)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn load(path: &Path) -> Result<DiskInstance> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DiskInstance::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn result_json(res: &SsspResult) -> serde_json::Value {
    let dist: Vec<serde_json::Value> = res
        .dist
        .iter()
        .map(|d| {
            if d.is_finite() {
                json!(d)
            } else {
                json!("inf")
            }
        })
        .collect();
    let prev: Vec<i64> = res
        .prev
        .iter()
        .map(|p| p.map_or(-1, |p| p.0 as i64))
        .collect();
    json!({ "dist": dist, "prev": prev })
}

fn solve(a: SolveArgs, exec: Execution) -> Result<ExitCode> {
    let inst = load(&a.input)?;
    let run = run_algo(&inst, a.algo, exec)?;
    let text = if a.json {
        let mut v = result_json(&run.result);
        v["algo"] = json!(a.algo.name());
        v["ms"] = json!(run.ms);
        v["rounds"] = json!(run.rounds);
        format!("{}\n", serde_json::to_string(&v)?)
    } else {
        run.result.to_text()
    };
    write_or_print(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let mut spec = GeneratorSpec::new(
        a.kind,
        a.n,
        a.psi,
        a.seed.unwrap_or_else(|| default_seed(0)),
    );
    if let Some(side) = a.side {
        spec = spec.with_side(side);
    }
    let inst = generate(&spec).map_err(|e| UsageError(e.to_string()))?;
    std::fs::write(&a.out, inst.to_text())
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs, exec: Execution) -> Result<ExitCode> {
    let inst = load(&a.input)?;
    let mut algos: Vec<Algo> = a.algos.clone();
    algos.dedup();
    if !algos.contains(&Algo::Oracle) && inst.len() <= DEFAULT_VERTEX_CAP {
        algos.push(Algo::Oracle);
    }
    let mut runs = Vec::new();
    for algo in algos {
        match run_algo(&inst, algo, exec) {
            Ok(run) => runs.push(run),
            Err(e) if algo == Algo::Oracle => println!("oracle skipped: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    let edges = if inst.len() <= 2000 {
        EdgeCheck::Full
    } else {
        EdgeCheck::Sampled {
            pairs: 200_000,
            seed: 1,
        }
    };
    let mut ok = true;
    for run in &runs {
        let violations = validate_result(&inst, &run.result, edges);
        if let Some(v) = violations.first() {
            ok = false;
            println!(
                "{}: invalid tree ({} violations), first: {v}",
                run.algo,
                violations.len()
            );
        }
    }
    let reference = &runs[0];
    for run in &runs[1..] {
        if let Some(i) = run.result.first_dist_mismatch(&reference.result) {
            ok = false;
            println!(
                "{} and {} disagree at vertex {i}: {} vs {}",
                reference.algo, run.algo, reference.result.dist[i], run.result.dist[i]
            );
        }
    }
    let names: Vec<&str> = runs.iter().map(|r| r.algo.name()).collect();
    if ok {
        println!("agree: {}", names.join(","));
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn bench(a: BenchArgs, exec: Execution) -> Result<ExitCode> {
    let suite = Suite::load(&a.suite)?;
    let outcome = run_suite(&suite, exec)?;
    append_csv(&a.csv, &outcome)?;
    println!(
        "{} records written to {}",
        outcome.records.len(),
        a.csv.display()
    );
    for line in outcome.fit.comment_lines() {
        println!("{line}");
    }
    if outcome.refused > 0 {
        println!("oracle refused {} instances above its cap", outcome.refused);
    }
    for d in &outcome.disagreements {
        println!("disagreement: {d}");
    }
    Ok(if outcome.disagreements.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
