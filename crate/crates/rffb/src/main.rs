use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rffb::config::ExperimentConfig;
use rffb::run::{execute, persist, seed_from_env};
use rffb_core::bounds::{compare_bounds, thm1_is_tightest, BoundQuery};

#[derive(Parser)]
#[command(
    name = "rffb",
    version,
    about = "Random Fourier feature error bounds: experiments and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config; exits 1 if any asserted inequality fails.
    Run {
        config: PathBuf,
        /// Worker threads. Results do not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a report JSON as SVG.
    Plot {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate every bound at one (R, D, epsilon, d).
    Bounds {
        #[arg(long = "R")]
        r: f64,
        #[arg(long = "D")]
        features: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
}

fn run(config: PathBuf, jobs: usize, out: Option<PathBuf>) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::from_path(&config)?;
    if let Some(seed) = seed_from_env()? {
        cfg.override_seed(seed);
    }
    let dir = out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let outcome = execute(&cfg, jobs)?;
    let files = persist(&outcome, &dir)?;
    let report = &outcome.report;
    eprintln!(
        "{} ({}): {} rows in {:.2}s",
        report.name,
        report.kind,
        report.rows.len(),
        report.runtime_seconds
    );
    for (row, check) in report.failed_checks() {
        eprintln!(
            "  FAIL row {row}: {} (empirical {:?}, analytic {:?}, slack {:?})",
            check.name, check.empirical, check.analytic, check.slack
        );
    }
    println!("{}", files.csv.display());
    println!("{}", files.json.display());
    if let Some(d) = files.detail {
        println!("{}", d.display());
    }
    Ok(report.all_pass)
}

fn bounds(r: f64, features: u64, eps: f64, d: u32) -> anyhow::Result<()> {
    let rows = compare_bounds(&BoundQuery::new(r, features, d, eps)?)?;
    println!(
        "{:<16} {:<8} {:>14} {:>14}",
        "bound", "kind", "value", "ln value"
    );
    for row in &rows {
        println!(
            "{:<16} {:<8} {:>14.6e} {:>14.6}",
            row.name,
            format!("{:?}", row.kind).to_lowercase(),
            row.value,
            row.log_value
        );
    }
    let verdict = if thm1_is_tightest(&rows) {
        "thm1 tightest"
    } else {
        "thm1 not tightest"
    };
    println!("{verdict}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, jobs, out } => run(config, jobs, out),
        Command::Plot { report, out } => rffb::plot::plot_file(&report, &out).map(|()| true),
        Command::Bounds {
            r,
            features,
            eps,
            d,
        } => bounds(r, features, eps, d).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
