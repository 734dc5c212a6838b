//! One module per subcommand. Each writes its CSVs and `summary.json` into
//! the output directory and returns the list of failed assertions.

pub mod chs_check;
pub mod contact_sweep;
pub mod estimator_check;
pub mod heat_check;
pub mod winding;

use serde::Serialize;
use specflow_core::connection::Connection;
use specflow_core::dirac::stable_cutoff;
use specflow_core::flow::{choose_params, EstimatorParams, EstimatorResult, SpectralFlowResult};
use specflow_core::forms::TrigPolyForm;

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

/// Largest cutoff the automatic raise will try.
pub const MAX_CUTOFF: usize = 48;

/// Failed assertions of one run; empty means success.
pub type Failures = Vec<String>;

pub fn starting_connection(cfg: &ExperimentConfig) -> Result<Connection, RunError> {
    let osc = match &cfg.osc {
        Some(f) => f.to_form().map_err(RunError::Config)?,
        None => TrigPolyForm::zero(cfg.n, 1, 1),
    };
    Ok(Connection::new(cfg.hol.clone(), osc)?)
}

/// Parameters from the `r^{-(1+q)}`, `ln r` rule with config overrides
/// applied on top, clamped to the trusted window.
pub fn estimator_params(cfg: &ExperimentConfig, rmax: f64, n: usize, trusted: f64) -> Result<EstimatorParams, RunError> {
    let rule = choose_params(rmax, n)?;
    let o = &cfg.estimator;
    let mut p = if o.t.is_none() && o.r.is_none() && o.q.is_none() {
        rule
    } else {
        let mut p = EstimatorParams::new(o.t.unwrap_or(rule.t), o.r.unwrap_or(rule.r), o.q.unwrap_or(rule.q))?;
        p.rmax = Some(rmax);
        p.warnings = rule.warnings;
        p
    };
    p = p.clamp_to(trusted);
    Ok(p)
}

/// Cutoff for a connection of contact strength `r`: the configured value,
/// grown with `r`, then raised until the trusted window is stable.
pub fn contact_cutoff(cfg: &ExperimentConfig, end: &Connection, r: f64) -> Result<(usize, f64), RunError> {
    let start = cfg.cutoff.max(8).max((0.75 * r).ceil() as usize);
    Ok(stable_cutoff(end, start, MAX_CUTOFF)?)
}

pub fn write_wp_csv(out: &OutputDir, file: &str, params: &str, est: &EstimatorResult) -> Result<(), RunError> {
    let rows: Vec<Vec<String>> = est
        .samples
        .iter()
        .map(|w| vec![num(w.s), num(w.lambda_min_abs), num(w.wp), w.n_s.to_string()])
        .collect();
    out.write_csv(file, params, &["s", "lambda_min_abs", "wp", "n_s"], &rows)
}

#[derive(Serialize)]
pub struct CrossingJson {
    pub s: f64,
    pub sign: i32,
    pub multiplicity: usize,
    pub branch: String,
    pub slope: f64,
}

#[derive(Serialize)]
pub struct FlowJson {
    pub f: i64,
    pub inertia_flow: i64,
    pub crossings: Vec<CrossingJson>,
    pub touches: usize,
    pub tracked_blocks: usize,
    pub refinements: usize,
    pub cutoff: usize,
    pub trusted_window: f64,
}

impl From<&SpectralFlowResult> for FlowJson {
    fn from(r: &SpectralFlowResult) -> Self {
        Self {
            f: r.f,
            inertia_flow: r.inertia_flow,
            crossings: r
                .crossings
                .iter()
                .map(|c| CrossingJson { s: c.s, sign: c.sign, multiplicity: c.multiplicity, branch: c.branch.clone(), slope: c.slope })
                .collect(),
            touches: r.touches.len(),
            tracked_blocks: r.tracked_blocks,
            refinements: r.refinements,
            cutoff: r.cutoff,
            trusted_window: r.trusted_window,
        }
    }
}

#[derive(Serialize)]
pub struct EstimatorJson {
    pub value: f64,
    pub n: usize,
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub q: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub window: f64,
    pub rmax: Option<f64>,
    pub clamped: bool,
    pub warnings: Vec<String>,
}

impl From<&EstimatorResult> for EstimatorJson {
    fn from(e: &EstimatorResult) -> Self {
        let p = &e.params;
        Self {
            value: e.value,
            n: e.n,
            t: p.t,
            r: p.r,
            q: p.q,
            big_t: p.big_t,
            window: p.window,
            rmax: p.rmax,
            clamped: p.clamped,
            warnings: p.warnings.clone(),
        }
    }
}
