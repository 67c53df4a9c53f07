use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use perpetuity_lab::{run, LabError, RunConfig};

/// Run one perpetuity computation from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "perpetuity-lab", version)]
struct Args {
    /// Path of the JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` of the config).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed (overrides the seeds of the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ERROR [{}] {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main_inner(args: &Args) -> Result<i32, LabError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.override_seed(s);
    }
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| LabError::config(format!("thread pool: {e}")))?;
    let out = args.output.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let summary = run(&cfg, &out, threads)?;
    for c in &summary.outcome.checks {
        println!("{}", c.summary());
    }
    Ok(summary.exit_code(cfg.checks.inconclusive_fails))
}
