//! Thin CLI over the experiment pipeline. All physics lives in the
//! library; this binary only parses arguments, resolves the config, runs
//! the requested task, and writes the artifacts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robustqoc::experiment::{
    emit_outputs, run_experiment, ExperimentConfig, StrategySelection, TaskId,
};

#[derive(Parser)]
#[command(name = "robustqoc", version, about = "Universally robust quantum optimal control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize pulses for a benchmark task and sweep noisy fidelities.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Benchmark task: transfer2, hadamard, or cz.
    #[arg(long)]
    task: String,
    /// Flat key-value config file (a.u. units); unknown keys are errors.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json, CSV tables, and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Strategies to run: target-only, robust, or both (default).
    #[arg(long, default_value = "both")]
    strategy: String,
    /// Parallel worker count (default: ROBUSTQOC_JOBS or all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(args: &RunArgs) -> Result<(), robustqoc::Error> {
    let jobs = args.jobs.or_else(|| {
        std::env::var("ROBUSTQOC_JOBS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(k) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| robustqoc::Error::Config(format!("worker pool setup failed: {e}")))?;
    }
    let task: TaskId = args.task.parse()?;
    let selection: StrategySelection = args.strategy.parse()?;
    let cfg = ExperimentConfig::from_file(&args.config, task, args.seed)?;
    let report = run_experiment(&cfg, selection)?;
    let paths = emit_outputs(&report, &args.out)?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({ "error": e.to_string() });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
