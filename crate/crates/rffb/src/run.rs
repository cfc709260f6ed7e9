use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;

use crate::config::ExperimentConfig;
use crate::exec::Pool;
use crate::experiments::run_plan;
use crate::report::{write_csv, Detail, Report, TOOL, VERSION};

/// Environment variable that replaces the config's master seed.
pub const SEED_ENV: &str = "RFFB_SEED";

/// A finished run: the report plus the optional per-trial table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub detail: Option<Detail>,
}

/// Where one run's files went.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub detail: Option<PathBuf>,
}

/// Reads `RFFB_SEED` if set. A malformed value is an error.
pub fn seed_from_env() -> anyhow::Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_ENV}={v:?} is not a nonnegative integer")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(SEED_ENV),
    }
}

/// Runs the experiment on `jobs` worker threads.
pub fn execute(cfg: &ExperimentConfig, jobs: usize) -> anyhow::Result<Outcome> {
    let pool = Pool::new(jobs)?;
    let start = Instant::now();
    let table =
        run_plan(cfg, &pool).with_context(|| format!("experiment `{}` failed", cfg.name))?;
    let runtime_seconds = start.elapsed().as_secs_f64();
    let unix_time = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let all_pass = table.rows.iter().all(|r| r.passes());
    let report = Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        kind: cfg.kind(),
        name: cfg.name.clone(),
        master_seed: cfg.seed,
        jobs: pool.jobs(),
        config: cfg.raw.clone(),
        columns: table.columns,
        rows: table.rows,
        all_pass,
        runtime_seconds,
        unix_time,
        notes: table.notes,
    };
    Ok(Outcome {
        report,
        detail: table.detail,
    })
}

/// Writes `<name>.csv`, `<name>.json` and, when present, `<name>.detail.csv`
/// into `dir`.
pub fn persist(outcome: &Outcome, dir: &Path) -> anyhow::Result<RunOutputs> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let report = &outcome.report;
    let csv = dir.join(format!("{}.csv", report.name));
    let json = dir.join(format!("{}.json", report.name));
    report.save_csv(&csv)?;
    report.save_json(&json)?;
    let detail = match &outcome.detail {
        Some((cols, rows)) => {
            let path = dir.join(format!("{}.detail.csv", report.name));
            write_csv(
                &path,
                &report.header_line(),
                cols,
                rows.iter().map(|r| &r[..]),
            )?;
            Some(path)
        }
        None => None,
    };
    Ok(RunOutputs { csv, json, detail })
}
