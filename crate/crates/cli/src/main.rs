//! `dps` — dynamic partial sorting workbench.
//!
//! Subcommands: `run` executes a JSON-lines trace on one engine (optionally
//! shadow-verified against the oracle), `fuzz` differentially tests an
//! engine pair on generated traces, `bench` emits per-operation counter CSV,
//! and `check` builds a random structure and runs the validators.
//!
//! Exit codes: 0 success, 1 mismatch or invariant violation, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dps_core::engine::{Engine, EngineKind};
use dps_core::harness::{bench, fuzz, parse_trace, run_trace, BenchConfig, FuzzConfig, CSV_HEADER};
use dps_core::harness::bench::random_values;
use dps_core::ltt::LttEngine;

#[derive(Parser)]
#[command(name = "dps", version, about = "Dynamic partial sorting over tournament trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON-lines trace file on one engine.
    Run(RunArgs),
    /// Differentially fuzz a pair of engines against each other.
    Fuzz(FuzzArgs),
    /// Measure operation counters over an (n, k) grid, writing CSV.
    Bench(BenchArgs),
    /// Build a random structure and run the structural validators.
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Trace file, one JSON operation per line.
    #[arg(long)]
    trace: PathBuf,
    /// Engine to execute on: tt, ltt or oracle.
    #[arg(long)]
    engine: EngineKind,
    /// Shadow-execute on the oracle and compare every output.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct FuzzArgs {
    /// Generator seed (DPS_SEED overrides).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of operations to generate.
    #[arg(long, default_value_t = 10_000)]
    ops: usize,
    /// Largest list the generator will produce.
    #[arg(long, default_value_t = 512)]
    max_size: usize,
    /// Engine pair as A:B, e.g. ltt:oracle.
    #[arg(long)]
    pair: String,
    /// Minimize the reproducing trace on mismatch.
    #[arg(long)]
    shrink: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated list sizes, e.g. 1024,16384.
    #[arg(long)]
    sizes: String,
    /// Comma-separated query sizes.
    #[arg(long)]
    ks: String,
    #[arg(long)]
    engine: EngineKind,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    engine: EngineKind,
    /// Number of elements in the random structure.
    #[arg(long)]
    n: usize,
    /// Permutation seed (DPS_SEED overrides).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct CheckReport {
    engine: &'static str,
    n: usize,
    seed: u64,
    ok: bool,
    violations: Vec<String>,
    height: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    layer_number: Option<u32>,
}

fn seed_override(cli_seed: u64) -> Result<u64, String> {
    match std::env::var("DPS_SEED") {
        Ok(s) => s
            .parse::<u64>()
            .map_err(|e| format!("DPS_SEED {s:?} is not a valid seed: {e}")),
        Err(_) => Ok(cli_seed),
    }
}

fn parse_pair(s: &str) -> Result<(EngineKind, EngineKind), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("pair must look like a:b, got {s:?}"))?;
    Ok((a.parse()?, b.parse()?))
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let out: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    out.map_err(|e| format!("bad list {s:?}: {e}"))
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&args.trace)
        .map_err(|e| format!("cannot read {}: {e}", args.trace.display()))?;
    let ops = parse_trace(&text).map_err(|e| e.to_string())?;
    match run_trace(&ops, args.engine, args.verify) {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Err(err @ dps_core::harness::HarnessError::Mismatch { .. }) => {
            println!(
                "{}",
                serde_json::json!({ "engine": args.engine.name(), "error": err.to_string() })
            );
            Ok(ExitCode::from(1))
        }
        Err(err) => Err(err.to_string()),
    }
}

fn cmd_fuzz(args: &FuzzArgs) -> Result<ExitCode, String> {
    let pair = parse_pair(&args.pair)?;
    let mut cfg = FuzzConfig::new(seed_override(args.seed)?, args.ops, args.max_size, pair);
    cfg.shrink = args.shrink;
    let report = fuzz(&cfg);
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(if report.clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, String> {
    let cfg = BenchConfig {
        sizes: parse_usize_list(&args.sizes)?,
        ks: parse_usize_list(&args.ks)?,
        engine: args.engine,
        repeats: args.repeats,
        seed: 1,
    };
    if cfg.sizes.is_empty() || cfg.ks.is_empty() {
        return Err("sizes and ks must be non-empty".into());
    }
    let rows = bench(&cfg);
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    std::fs::write(&args.out, text)
        .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode, String> {
    if args.n == 0 {
        return Err("n must be at least 1".into());
    }
    let seed = seed_override(args.seed)?;
    let values = random_values(seed, args.n);

    // The layered engine reports its layer count; the generic path covers
    // the rest.
    let (report, layer_number, height) = if args.engine == EngineKind::Ltt {
        let mut engine = LttEngine::new();
        let list = engine.new_list(&values).map_err(|e| e.to_string())?;
        let report = engine.validate(list).map_err(|e| e.to_string())?;
        let layers = engine.layer_number_of(list).map_err(|e| e.to_string())?;
        let height = engine
            .tree(list)
            .map_err(|e| e.to_string())?
            .height(engine.arena());
        (report, Some(layers), height)
    } else {
        let mut engine = args.engine.build();
        let list = engine.new_list(&values).map_err(|e| e.to_string())?;
        let report = engine.validate(list).map_err(|e| e.to_string())?;
        (report, None, 0)
    };

    let out = CheckReport {
        engine: args.engine.name(),
        n: args.n,
        seed,
        ok: report.ok(),
        violations: report
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.rule, v.detail))
            .collect(),
        height,
        layer_number,
    };
    println!("{}", serde_json::to_string(&out).expect("report serializes"));
    Ok(if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
