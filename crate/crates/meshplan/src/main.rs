//! Command-line front end over the benchmark harness: canned sweeps,
//! user-supplied config files, and cross-strategy comparison of result
//! files.

use std::env;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use meshplan::bench::{self, canned, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "meshplan",
    version,
    about = "Exact planning and benchmarking for grid sensor meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config file.
    Run {
        /// Path to the config document.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Canned sweep: random vs exact static placement, both finished by
    /// the coverage-maximizing mobile stage, across six fleet sizes.
    Table2 {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Canned sweep: travel ranges 1..5 plus a longer-horizon tail point.
    Table3 {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Canned sweep: movement minimization under growing fleets at the
    /// full-coverage target.
    Fig4 {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Rank strategies and check dominance over existing result files.
    Compare {
        /// One or more CSV files written by the other subcommands.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    /// Output CSV path; defaults to the config's own, then results.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the configured seeds with 1..=N.
    #[arg(long)]
    seed_count: Option<u64>,
    /// Wall-clock cap per exact solve, in seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Threads for the sweep. Falls back to MESHPLAN_WORKERS, then to one
    /// thread per core.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, overrides } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            run(vec![ScenarioConfig::from_json(&text)?], overrides)
        }
        Command::Table2 { overrides } => run(vec![canned::table2()], overrides),
        Command::Table3 { overrides } => run(canned::table3(), overrides),
        Command::Fig4 { overrides } => run(vec![canned::fig4()], overrides),
        Command::Compare { files } => compare(&files),
    }
}

fn run(mut configs: Vec<ScenarioConfig>, overrides: Overrides) -> Result<()> {
    for config in &mut configs {
        if let Some(count) = overrides.seed_count {
            config.seeds = None;
            config.seed_count = Some(count);
        }
        if let Some(seconds) = overrides.max_seconds {
            config.solver.max_seconds = Some(seconds);
        }
    }
    let workers = resolve_workers(overrides.workers)?;
    let out = overrides
        .out
        .or_else(|| configs.iter().find_map(|c| c.output.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    let rows = bench::run_suite(&configs, workers)?;
    bench::emit_csv(&rows, &out)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn compare(files: &[PathBuf]) -> Result<()> {
    let mut rows = Vec::new();
    for file in files {
        let parsed =
            bench::read_csv(file).with_context(|| format!("reading {}", file.display()))?;
        rows.extend(parsed);
    }
    print!("{}", bench::compare_report(&rows)?);
    Ok(())
}

fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(count) = flag {
        if count == 0 {
            bail!("--workers must be at least 1");
        }
        return Ok(Some(count));
    }
    match env::var("MESHPLAN_WORKERS") {
        Ok(value) => {
            let count: usize = value
                .parse()
                .with_context(|| format!("MESHPLAN_WORKERS={value} is not a thread count"))?;
            if count == 0 {
                bail!("MESHPLAN_WORKERS must be at least 1");
            }
            Ok(Some(count))
        }
        Err(env::VarError::NotPresent) => Ok(None),
        Err(error) => Err(error).context("reading MESHPLAN_WORKERS"),
    }
}
