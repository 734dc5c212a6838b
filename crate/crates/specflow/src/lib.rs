//! Experiment runner for `specflow-core`: JSON configs in, CSV and JSON
//! tables out, with a fixed exit-code contract.

pub mod config;
pub mod error;
pub mod experiments;
pub mod forms_json;
pub mod output;

use std::path::Path;

use config::{Experiment, ExperimentConfig};
use error::RunError;
use output::OutputDir;

/// Exit code when every run completed but some assertion failed.
pub const EXIT_ASSERTION: u8 = 2;

/// Result of one experiment run.
#[derive(Debug)]
pub enum Outcome {
    Passed,
    Failed(Vec<String>),
    Error(RunError),
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Passed => 0,
            Outcome::Failed(_) => EXIT_ASSERTION,
            Outcome::Error(e) => e.exit_code(),
        }
    }
}

/// Runs one experiment into `<out_root>/<experiment>/`, writing the resolved
/// config before any computation.
pub fn run(cfg: &ExperimentConfig, out_root: &Path) -> Outcome {
    let go = || -> Result<Vec<String>, RunError> {
        cfg.validate()?;
        let out = OutputDir::create(out_root, cfg.experiment.name())?;
        out.write_config(cfg)?;
        match cfg.experiment {
            Experiment::Winding => experiments::winding::run(cfg, &out),
            Experiment::ContactSweep => experiments::contact_sweep::run(cfg, &out),
            Experiment::EstimatorCheck => experiments::estimator_check::run(cfg, &out),
            Experiment::HeatCheck => experiments::heat_check::run(cfg, &out),
            Experiment::ChsCheck => experiments::chs_check::run(cfg, &out),
        }
    };
    match go() {
        Ok(f) if f.is_empty() => Outcome::Passed,
        Ok(f) => Outcome::Failed(f),
        Err(e) => Outcome::Error(e),
    }
}

/// Combined exit code of several runs: config errors outrank certificate
/// failures, which outrank assertion failures, which outrank i/o errors.
pub fn combined_exit_code(outcomes: &[Outcome]) -> u8 {
    const RANK: [u8; 5] = [4, 3, 2, 1, 0];
    let codes: Vec<u8> = outcomes.iter().map(Outcome::exit_code).collect();
    RANK.into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}
