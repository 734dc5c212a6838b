use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use specflow::config::{Experiment, ExperimentConfig};
use specflow::error::RunError;
use specflow::{combined_exit_code, run, Outcome};

/// Spectral flow experiments on flat tori.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file; for `all`, a directory holding `<experiment>.json` files.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root (overrides SPECFLOW_OUT and the config's `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Circle paths with known winding.
    Winding,
    /// Contact paths with growing strength r.
    ContactSweep,
    /// Estimator and path properties of the exact count.
    EstimatorCheck,
    /// Heat trace, kernel and density diagnostics.
    HeatCheck,
    /// Forms and Chern-Simons identities.
    ChsCheck,
    /// Every experiment in turn.
    All,
}

impl Command {
    fn experiments(self) -> Vec<Experiment> {
        match self {
            Command::Winding => vec![Experiment::Winding],
            Command::ContactSweep => vec![Experiment::ContactSweep],
            Command::EstimatorCheck => vec![Experiment::EstimatorCheck],
            Command::HeatCheck => vec![Experiment::HeatCheck],
            Command::ChsCheck => vec![Experiment::ChsCheck],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

fn load(cli: &Cli, experiment: Experiment) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match (&cli.config, cli.command) {
        (None, _) => ExperimentConfig::default_for(experiment),
        (Some(dir), Command::All) => ExperimentConfig::load(&dir.join(format!("{}.json", experiment.name())))?,
        (Some(file), _) => ExperimentConfig::load(file)?,
    };
    if cfg.experiment != experiment {
        return Err(RunError::Config(format!(
            "config is for `{}`, not `{}`",
            cfg.experiment.name(),
            experiment.name()
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("SPECFLOW_OUT").map(PathBuf::from))
        .or_else(|| cfg.out.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.out = Some(out.to_string_lossy().into_owned());
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("config error: cannot use {n} threads");
            return ExitCode::from(4);
        }
    }
    let mut outcomes = Vec::new();
    for experiment in cli.command.experiments() {
        let outcome = match load(&cli, experiment) {
            Ok(cfg) => run(&cfg, Path::new(cfg.out.as_deref().unwrap_or("out"))),
            Err(e) => Outcome::Error(e),
        };
        match &outcome {
            Outcome::Passed => println!("{}: ok", experiment.name()),
            Outcome::Failed(fails) => {
                println!("{}: FAILED", experiment.name());
                for f in fails {
                    println!("  {f}");
                }
            }
            Outcome::Error(e) => eprintln!("{}: {e}", experiment.name()),
        }
        outcomes.push(outcome);
    }
    ExitCode::from(combined_exit_code(&outcomes))
}
