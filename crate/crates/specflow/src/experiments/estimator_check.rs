//! Estimator against exact flow on winding and contact paths, plus the
//! path properties of the exact count: reversal, refinement, additivity.

use serde::Serialize;
use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::dirac::r_of_a;
use specflow_core::flow::{estimator_flow, exact_flow, PathSpec};
use specflow_core::forms::TrigPolyForm;
use specflow_core::math::{PI, TAU};
use specflow_core::{Error, C64};

use super::{contact_cutoff, estimator_params, starting_connection, write_wp_csv, EstimatorJson, Failures};
use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

const WINDING_CUTOFF: usize = 6;

#[derive(Serialize)]
struct PathReport {
    path: String,
    n: usize,
    f: i64,
    reversed: i64,
    refined: i64,
    split_at: f64,
    halves: (i64, i64),
    estimator: EstimatorJson,
}

pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> Result<Failures, RunError> {
    let mut paths = Vec::new();
    let circle = Connection::flat(vec![PI])?;
    for &m in &cfg.winding {
        let v = TrigPolyForm::dx(1, 0).scale(C64::new(0.0, TAU * m as f64));
        paths.push((format!("winding m={m}"), PathSpec::new(circle.clone(), v, cfg.intervals, WINDING_CUTOFF, cfg.gap)?));
    }
    if cfg.n == 3 {
        let a0 = starting_connection(cfg)?;
        for &r in &cfg.r_sweep {
            let v = spin_c_increment(&contact_form(), r);
            let end = Connection::new(a0.holonomy().to_vec(), a0.oscillatory().add(&v)?)?;
            let (k, _) = contact_cutoff(cfg, &end, r)?;
            paths.push((format!("contact r={r}"), PathSpec::new(a0.clone(), v, cfg.intervals, k, cfg.gap)?));
        }
    }

    let mut failures = Vec::new();
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    for (i, (name, path)) in paths.iter().enumerate() {
        let n = path.dim();
        let f = exact_flow(path)?.f;
        let reversed = exact_flow(&path.reversed()?)?.f;
        let refined = exact_flow(&path.refined())?.f;
        let (split_at, halves) = split_flow(path)?;
        let rmax = r_of_a(path.start(), 8)?.max(r_of_a(&path.end()?, 8)?);
        let params = estimator_params(cfg, rmax, n, path.layout()?.trusted_window())?;
        let est = estimator_flow(path, &params)?;
        write_wp_csv(
            out,
            &format!("wp_{i}.csv"),
            &format!("{name} n={n} K={} t={} R={} T={}", path.cutoff(), params.t, params.r, params.big_t),
            &est,
        )?;

        let mut record = |check: &str, value: f64, expected: f64, pass: bool| {
            if !pass {
                failures.push(format!("{name}: {check} = {value}, expected {expected}"));
            }
            checks.push(vec![name.clone(), check.into(), num(value), num(expected), pass.to_string()]);
        };
        record("estimate within n", est.value, f as f64, (est.value - f as f64).abs() <= n as f64);
        record("reversed", reversed as f64, -f as f64, reversed == -f);
        record("refined", refined as f64, f as f64, refined == f);
        record("additivity", (halves.0 + halves.1) as f64, f as f64, halves.0 + halves.1 == f);
        reports.push(PathReport { path: name.clone(), n, f, reversed, refined, split_at, halves, estimator: (&est).into() });
    }
    out.write_csv(
        "checks.csv",
        &format!("estimator-check intervals={} gap={}", cfg.intervals, cfg.gap),
        &["path", "check", "value", "expected", "pass"],
        &checks,
    )?;
    out.write_json(
        "summary.json",
        &serde_json::json!({ "experiment": "estimator-check", "paths": reports, "failures": failures }),
    )?;
    Ok(failures)
}

/// Flow over `[0, s*]` and `[s*, 1]` for the first `s*` near the middle whose
/// operator is gapped.
fn split_flow(path: &PathSpec) -> Result<(f64, (i64, i64)), RunError> {
    let end = path.end()?;
    let half = (path.grid().len() - 1).div_ceil(2).max(1);
    for j in 0..8 {
        let s = 0.5 + 0.0137 * j as f64;
        let mid = path.at(s)?;
        let first = PathSpec::between(path.start(), &mid, half, path.cutoff(), path.gap()).and_then(|p| exact_flow(&p));
        let second = PathSpec::between(&mid, &end, half, path.cutoff(), path.gap()).and_then(|p| exact_flow(&p));
        match (first, second) {
            (Ok(a), Ok(b)) => return Ok((s, (a.f, b.f))),
            (Err(Error::EndpointZeroMode { .. }), _) | (_, Err(Error::EndpointZeroMode { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    Err(RunError::Config("no gapped split point near s = 0.5".into()))
}
