use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use batchcolor::exec::Exec;
use batchcolor::harness::{
    bench, emit_workload, generate_workload, parse_workload, run, Algorithm, BenchConfig, GenConfig, RunConfig,
    VerifyMode, Workload,
};
use batchcolor::Error;

#[derive(Parser)]
#[command(name = "batchcolor", version, about = "Batch-dynamic (Δ+1) coloring: replay, generate, verify, bench")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a workload and print a JSON report.
    Run {
        #[arg(long)]
        workload: PathBuf,
        #[arg(long, value_enum, default_value = "parallel")]
        algorithm: Algorithm,
        #[arg(long, value_enum, default_value = "end")]
        verify: VerifyMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Recount the token ledger every K batches (0 = never).
        #[arg(long, default_value_t = 0)]
        ledger_check: u64,
        /// Print one JSON line per batch before the report.
        #[arg(long)]
        per_batch: bool,
        /// Check every internal invariant after every batch.
        #[arg(long)]
        audit: bool,
    },
    /// Generate a random workload.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        batches: usize,
        #[arg(long)]
        batch_size: usize,
        #[arg(long, default_value_t = 0.7)]
        mix: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a workload, checking propriety after every batch.
    Verify {
        #[arg(long)]
        workload: PathBuf,
        #[arg(long, value_enum, default_value = "parallel")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Work per update over a sweep of Δ on fresh random graphs.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "9,81,729")]
        deltas: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        updates: usize,
        #[arg(long, default_value_t = 0.6)]
        mix: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<Workload, Error> {
    parse_workload(&std::fs::read_to_string(path)?)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("reports serialize"));
}

/// Ok(true) when the command succeeded without violations.
fn execute(cli: Cli) -> Result<bool, Error> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.cmd {
        Cmd::Run { workload, algorithm, verify, seed, ledger_check, per_batch, audit } => {
            let w = load(&workload)?;
            let cfg = RunConfig { algorithm, verify, seed, ledger_check, per_batch, exec, audit };
            let out = run(&w, &cfg)?;
            out.per_batch.iter().for_each(print_json);
            print_json(&out.report);
            Ok(out.report.is_ok())
        }
        Cmd::Gen { n, delta, batches, batch_size, mix, seed, out } => {
            let text = emit_workload(&generate_workload(&GenConfig { n, delta, batches, batch_size, mix, seed })?);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Verify { workload, algorithm, seed } => {
            let w = load(&workload)?;
            let cfg = RunConfig { verify: VerifyMode::EveryBatch, exec, ..RunConfig::new(algorithm, seed) };
            let r = run(&w, &cfg)?.report;
            print_json(&serde_json::json!({
                "batches": r.batches,
                "updates_applied": r.updates_applied,
                "dropped": r.dropped,
                "verify_scans": r.verify_scans,
                "violations": r.violations,
                "violation_samples": r.violation_samples,
            }));
            Ok(r.is_ok())
        }
        Cmd::Bench { deltas, n, updates, mix, seed } => {
            let report = bench(&BenchConfig { deltas, n, updates, mix, seed, exec })?;
            print_json(&report);
            Ok(report.points.iter().all(|p| p.violations == 0))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
