use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::forms_json::FormJson;

/// Which experiment a config drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Winding,
    ContactSweep,
    EstimatorCheck,
    HeatCheck,
    ChsCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Self::Winding, Self::ContactSweep, Self::EstimatorCheck, Self::HeatCheck, Self::ChsCheck];

    pub fn name(self) -> &'static str {
        match self {
            Self::Winding => "winding",
            Self::ContactSweep => "contact-sweep",
            Self::EstimatorCheck => "estimator-check",
            Self::HeatCheck => "heat-check",
            Self::ChsCheck => "chs-check",
        }
    }
}

/// Overrides for the estimator parameters; unset fields come from the
/// `t = r^{-(1+q)}`, `R = ln r` rule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorOverrides {
    pub t: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Free-form label recorded in the outputs.
    pub name: String,
    pub n: usize,
    /// Fourier cutoff `K` (a starting value where the experiment raises it).
    pub cutoff: usize,
    /// Number of uniform intervals of the `s`-grid.
    pub intervals: usize,
    #[serde(default = "default_gap")]
    pub gap: f64,
    /// Holonomy of the starting connection.
    pub hol: Vec<f64>,
    /// Oscillatory part of the starting connection.
    #[serde(default)]
    pub osc: Option<FormJson>,
    #[serde(default)]
    pub winding: Vec<i32>,
    #[serde(default)]
    pub r_sweep: Vec<f64>,
    #[serde(default)]
    pub estimator: EstimatorOverrides,
    /// Heat times for the heat checks.
    #[serde(default)]
    pub heat_times: Vec<f64>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

fn default_gap() -> f64 {
    1e-3
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            RunError::Config(m) => RunError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, RunError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked before computing.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name {:?} must be a plain directory name", self.name));
        }
        if self.experiment != Experiment::ChsCheck && self.n != 1 && self.n != 3 {
            return bad(format!("n must be 1 or 3, got {}", self.n));
        }
        if self.hol.len() != self.n {
            return bad(format!("hol has {} entries, expected n = {}", self.hol.len(), self.n));
        }
        if self.cutoff == 0 || self.intervals == 0 {
            return bad("cutoff and intervals must be positive".into());
        }
        if !(self.gap > 0.0) {
            return bad(format!("gap must be positive, got {}", self.gap));
        }
        if let Some(osc) = &self.osc {
            if osc.n != self.n || osc.degree != 1 || osc.fiber != 1 {
                return bad("osc must be a rank-one 1-form on T^n".into());
            }
            osc.to_form().map_err(RunError::Config)?;
        }
        let e = &self.estimator;
        if e.t.is_some_and(|t| !(t > 0.0)) || e.r.is_some_and(|r| !(r >= 1.0)) || e.q.is_some_and(|q| !(q > 0.0)) {
            return bad("estimator overrides need t > 0, R >= 1, q > 0".into());
        }
        if self.r_sweep.iter().any(|r| !(*r > 0.0)) || self.heat_times.iter().any(|t| !(*t > 0.0)) {
            return bad("r_sweep and heat_times entries must be positive".into());
        }
        match self.experiment {
            Experiment::Winding if self.n != 1 => bad("winding needs n = 1".into()),
            Experiment::Winding if self.winding.is_empty() => bad("winding needs a non-empty winding list".into()),
            Experiment::ContactSweep if self.n != 3 => bad("contact-sweep needs n = 3".into()),
            Experiment::ContactSweep if self.r_sweep.len() < 3 => bad("contact-sweep needs at least three r values".into()),
            Experiment::HeatCheck if self.heat_times.is_empty() => bad("heat-check needs heat_times".into()),
            _ => Ok(()),
        }
    }

    /// Built-in configuration matching the shipped `configs/<name>.json`.
    pub fn default_for(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            name: experiment.name().into(),
            n: 3,
            cutoff: 8,
            intervals: 24,
            gap: default_gap(),
            hol: vec![0.31, -0.17, 0.05],
            osc: None,
            winding: Vec::new(),
            r_sweep: Vec::new(),
            estimator: EstimatorOverrides::default(),
            heat_times: Vec::new(),
            out: None,
            seed: 7,
        };
        match experiment {
            Experiment::Winding => Self {
                n: 1,
                cutoff: 6,
                hol: vec![std::f64::consts::PI],
                winding: (-3..=3).collect(),
                ..base
            },
            Experiment::ContactSweep => Self { r_sweep: vec![4.0, 6.0, 8.0, 12.0, 16.0], ..base },
            Experiment::EstimatorCheck => Self { intervals: 32, r_sweep: vec![4.0, 8.0], winding: vec![-3, -1, 2, 3], ..base },
            Experiment::HeatCheck => Self { cutoff: 12, r_sweep: vec![1.0, 8.0], heat_times: vec![0.1, 0.03, 0.01, 0.003, 0.001], ..base },
            Experiment::ChsCheck => Self { n: 3, ..base },
        }
    }
}
