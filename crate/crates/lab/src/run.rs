//! Running a config end to end: compute, write tables and the manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::commands::execute;
use crate::config::RunConfig;
use crate::error::LabError;
use crate::output::{write_atomic, write_tables, CheckLine, Outcome, Status};

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'static str,
    seed: u64,
    threads: usize,
    /// Seconds since the Unix epoch; the only run-dependent field.
    timestamp: u64,
    tables: Vec<String>,
    checks: &'a [CheckLine],
    config: &'a RunConfig,
}

#[derive(Debug)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

impl RunSummary {
    /// 0 when nothing failed, 1 otherwise (INCONCLUSIVE counts as failure
    /// only when configured so).
    pub fn exit_code(&self, inconclusive_fails: bool) -> i32 {
        let bad = self.outcome.checks.iter().any(|c| {
            c.status == Status::Fail || (inconclusive_fails && c.status == Status::Inconclusive)
        });
        i32::from(bad)
    }
}

/// Run `cfg`, writing artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<RunSummary, LabError> {
    let outcome = execute(cfg)?;
    let files = write_tables(out_dir, &outcome.tables)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: perpetuity_core::VERSION,
        command: cfg.command.name(),
        seed: cfg.sim.seed,
        threads,
        timestamp,
        tables: outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
        checks: &outcome.checks,
        config: cfg,
    };
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(RunSummary {
        outcome,
        files,
        manifest: path,
    })
}
