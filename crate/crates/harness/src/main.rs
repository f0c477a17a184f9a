use std::path::PathBuf;

use anyhow::Context;
use capa_harness::{run_experiment, summarize, Algorithm, Experiment, ExperimentSpec, OUTPUT_DIR_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "capa",
    about = "Energy-efficiency experiments for continuous-aperture multicast"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write trace.csv, runs.csv and summary.csv.
    Run(RunArgs),
    /// Print and write mean EE per sweep point for runs.csv files under DIR.
    Summarize { dir: PathBuf },
}

#[derive(clap::Args)]
struct RunArgs {
    /// convergence, aperture-sweep, spread-sweep, users-sweep or ratefloor-sweep
    experiment: Experiment,
    /// Experiment file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = "results")]
    out: PathBuf,
    /// Space- or comma-separated sweep values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sweep: Option<Vec<f64>>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    users_per_group: Option<usize>,
    #[arg(long)]
    rate_floor: Option<f64>,
    #[arg(long)]
    power_budget: Option<f64>,
    #[arg(long)]
    noise_variance: Option<f64>,
    #[arg(long)]
    spread_radius: Option<f64>,
    #[arg(long)]
    grid_order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_outer: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Leave wall_ms empty so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn build_spec(a: RunArgs) -> anyhow::Result<ExperimentSpec> {
    let out = a.out.join(a.experiment.id());
    let mut spec = match &a.config {
        Some(p) => {
            let s = ExperimentSpec::load(p, &out).with_context(|| format!("reading {}", p.display()))?;
            anyhow::ensure!(
                s.experiment == a.experiment,
                "{} describes {}",
                p.display(),
                s.experiment
            );
            s
        }
        None => ExperimentSpec::new(a.experiment, &out),
    };
    spec.output_dir = out;
    if let Some(v) = a.sweep {
        spec.sweep = v;
    }
    if let Some(v) = a.realizations {
        spec.num_realizations = v;
    }
    if let Some(v) = a.algorithms {
        spec.algorithms = v;
    }
    let b = &mut spec.base;
    if let Some(v) = a.seed {
        b.rng_seed = v;
    }
    if let Some(v) = a.groups {
        b.num_groups = v;
        let f = b.rate_floors.first().copied().unwrap_or(0.0);
        b.rate_floors = vec![f; v];
    }
    if let Some(v) = a.users_per_group {
        b.users_per_group = v;
    }
    if let Some(v) = a.rate_floor {
        b.rate_floors = vec![v; b.num_groups];
    }
    if let Some(v) = a.power_budget {
        b.power_budget = v;
    }
    if let Some(v) = a.noise_variance {
        b.noise_variance = v;
    }
    if let Some(v) = a.spread_radius {
        b.spread_radius = v;
    }
    if let Some(v) = a.grid_order {
        b.grid_order = v;
    }
    if let Some(v) = a.tol {
        spec.dinkelbach.tol = v;
        spec.cov.tol = v;
        spec.zf.tol = v;
    }
    if let Some(v) = a.max_outer {
        spec.dinkelbach.max_outer = v;
    }
    if a.threads.is_some() {
        spec.threads = a.threads;
    }
    if a.no_timing {
        spec.timing = false;
    }
    spec.validate()?;
    Ok(spec)
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run(args) => {
            let spec = build_spec(args)?;
            let out = run_experiment(&spec)?;
            print!("{}", capa_harness::summary::render(&out.summary));
            println!("wrote {}", out.dir.display());
        }
        Command::Summarize { dir } => {
            let rows = match summarize(&dir) {
                Err(capa_harness::HarnessError::EmptySummary(d)) => {
                    println!("empty summary: no runs found under {d}");
                    return Ok(());
                }
                r => r?,
            };
            print!("{}", capa_harness::summary::render(&rows));
            let path = dir.join(capa_harness::runner::SUMMARY_FILE);
            capa_harness::summary::write_summary(&path, &rows)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
