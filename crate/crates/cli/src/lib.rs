//! Batch Monte Carlo runner for `hawkes-core`.
//!
//! `hawkes simulate --config exp.json` runs every scheme listed in the
//! config for every step count, seeds path `i` with stream `(seed, i)` and
//! writes `results.csv`, `summary.json` and whatever else the config asks
//! for. The other subcommands run one output family only.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hawkes_core::montecarlo::with_threads;

pub use config::{Experiment, ExperimentConfig, Method};
pub use error::CliError;
pub use experiment::{Artifacts, BatchResult, Estimate, Report, TestRecord, Trajectory};

pub const DEFAULT_OUTPUT_DIR: &str = "hawkes-out";

#[derive(Debug, Parser)]
#[command(
    name = "hawkes",
    version,
    about = "Monte Carlo experiments for Hawkes process simulation schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, env = "HAWKES_THREADS")]
    pub threads: Option<usize>,
    /// Overrides the seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run everything the config asks for.
    Simulate(RunArgs),
    /// Laplace transforms of N_T and Λ_T only.
    Laplace(RunArgs),
    /// Two-sample comparisons of the terminal laws against the reference.
    Marginals(RunArgs),
    /// Random time-change diagnostics.
    Timechange(RunArgs),
    /// Timings only.
    Bench(RunArgs),
    /// Write single trajectories (t, N, Λ, λ).
    Trajectory {
        #[command(flatten)]
        run: RunArgs,
        /// Path indices; defaults to the config's list, or path 0.
        #[arg(long = "path", value_delimiter = ',')]
        paths: Vec<usize>,
    },
}

impl Command {
    pub fn run_args(&self) -> &RunArgs {
        match self {
            Self::Simulate(a)
            | Self::Laplace(a)
            | Self::Marginals(a)
            | Self::Timechange(a)
            | Self::Bench(a) => a,
            Self::Trajectory { run, .. } => run,
        }
    }

    /// Restricts the requested outputs to this subcommand.
    fn select_outputs(&self, cfg: &mut ExperimentConfig) {
        let outputs = std::mem::take(&mut cfg.outputs);
        match self {
            Self::Simulate(_) => cfg.outputs = outputs,
            Self::Laplace(_) => {
                cfg.outputs.laplace = Some(outputs.laplace.unwrap_or(config::LaplaceConfig {
                    w: Vec::new(),
                    reference_mean: true,
                }))
            }
            Self::Marginals(_) => cfg.outputs.marginals = true,
            Self::Timechange(_) => {
                cfg.outputs.time_change = Some(outputs.time_change.unwrap_or_default())
            }
            Self::Bench(_) => cfg.outputs.timing = true,
            Self::Trajectory { paths, .. } => {
                cfg.outputs.trajectories = if !paths.is_empty() {
                    paths.clone()
                } else if !outputs.trajectories.is_empty() {
                    outputs.trajectories
                } else {
                    vec![0]
                }
            }
        }
    }
}

/// Loads, validates and runs a config; no files are written.
pub fn run_experiment(exp: &Experiment) -> Result<Artifacts, CliError> {
    let outputs = &exp.config.outputs;
    let mut artifacts = Artifacts::default();
    let only_trajectories = outputs.laplace.is_none()
        && !outputs.marginals
        && outputs.time_change.is_none()
        && !outputs.timing
        && !outputs.trajectories.is_empty();
    if !only_trajectories {
        let mut report = exp.run_batches()?;
        artifacts.time_change_paths = exp.run_time_change(&mut report)?;
        artifacts.report = Some(report);
    }
    artifacts.trajectories = exp.trajectories(&outputs.trajectories)?;
    Ok(artifacts)
}

/// Runs one CLI command and returns the written files.
pub fn execute(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let args = command.run_args();
    let text = std::fs::read_to_string(&args.config).map_err(|source| {
        CliError::Config(format!("cannot read {}: {source}", args.config.display()))
    })?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    command.select_outputs(&mut cfg);
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let exp = cfg.validate()?;
    let artifacts = with_threads(args.threads, || run_experiment(&exp))
        .map_err(|e| CliError::Config(format!("threads: {e}")))??;
    output::write_artifacts(
        &dir,
        &exp.config,
        artifacts.report.as_ref(),
        &artifacts.trajectories,
        &artifacts.time_change_paths,
    )
}
