//! Contact paths `A_s = A_0 + s·(r/2)a`: the flow against the
//! Chern-Simons prediction and its `-r²/16π` leading order as `r` grows.

use serde::Serialize;
use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::dirac::r_of_a;
use specflow_core::flow::{estimator_flow, exact_flow, PathSpec};
use specflow_core::forms::{leading_order, prediction, CurvatureInput};
use specflow_core::math::least_squares_slope;

use super::{contact_cutoff, estimator_params, starting_connection, write_wp_csv, EstimatorJson, Failures, FlowJson};
use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

/// Accepted range for the growth exponent of `|f|`.
pub const SLOPE_RANGE: (f64, f64) = (1.8, 2.2);

#[derive(Serialize)]
struct Row {
    r: f64,
    cutoff: usize,
    cutoff_drift: f64,
    r_of_a: f64,
    flow: FlowJson,
    prediction: f64,
    leading_order: f64,
    estimator: EstimatorJson,
}

pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> Result<Failures, RunError> {
    let a0 = starting_connection(cfg)?;
    let mut rs = cfg.r_sweep.clone();
    rs.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &r in &rs {
        let v = spin_c_increment(&contact_form(), r);
        let end = Connection::new(a0.holonomy().to_vec(), a0.oscillatory().add(&v)?)?;
        let (k, drift) = contact_cutoff(cfg, &end, r)?;
        let path = PathSpec::new(a0.clone(), v, cfg.intervals, k, cfg.gap)?;
        let flow = exact_flow(&path)?;
        let pred = prediction(path.start(), &end, &CurvatureInput::flat(3))?.value;
        let lead = leading_order(&contact_form(), r)?.value;
        let ra = r_of_a(&end, 8)?;
        let params = estimator_params(cfg, ra.max(r_of_a(&a0, 8)?), 3, path.layout()?.trusted_window())?;
        let est = estimator_flow(&path, &params)?;
        let params_line = format!(
            "contact-sweep r={r} n=3 K={k} intervals={} gap={} t={} R={} T={}",
            cfg.intervals, cfg.gap, params.t, params.r, params.big_t
        );
        write_wp_csv(out, &format!("wp_r{r}.csv"), &params_line, &est)?;
        rows.push(Row {
            r,
            cutoff: k,
            cutoff_drift: drift,
            r_of_a: ra,
            flow: (&flow).into(),
            prediction: pred,
            leading_order: lead,
            estimator: (&est).into(),
        });
    }

    let mut failures = Vec::new();
    for row in &rows {
        if row.flow.f != row.flow.inertia_flow {
            failures.push(format!("r = {}: crossing count {} disagrees with inertia count {}", row.r, row.flow.f, row.flow.inertia_flow));
        }
    }
    // Growth exponent over the upper half of the sweep.
    let top = &rows[rows.len() / 2..];
    let pts: Vec<(f64, f64)> =
        top.iter().filter(|x| x.flow.f != 0).map(|x| (x.r.ln(), (x.flow.f as f64).abs().ln())).collect();
    let slope = if pts.len() == top.len() { least_squares_slope(&pts) } else { None };
    match slope {
        Some(s) if (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&s) => {}
        Some(s) => failures.push(format!("log|f| vs log r slope {s:.3} outside [{}, {}]", SLOPE_RANGE.0, SLOPE_RANGE.1)),
        None => failures.push("slope undefined: zero flow in the upper half of the sweep".into()),
    }
    let rel = |x: &Row| (x.flow.f as f64 / x.prediction - 1.0).abs();
    let first = rows.iter().find(|x| x.flow.f != 0);
    let (rel_first, rel_last) = (first.map(rel), rel(rows.last().unwrap()));
    if !first.is_some_and(|x| rel_last < rel(x)) {
        failures.push(format!("|f/prediction - 1| does not shrink: {rel_first:?} -> {rel_last}"));
    }

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|x| {
            vec![
                num(x.r),
                x.cutoff.to_string(),
                x.flow.f.to_string(),
                num(x.prediction),
                num(x.leading_order),
                num(x.estimator.value),
                num(x.r_of_a),
                num(x.cutoff_drift),
            ]
        })
        .collect();
    out.write_csv(
        "sweep.csv",
        &format!("contact-sweep n=3 intervals={} hol={:?} start_cutoff={}", cfg.intervals, cfg.hol, cfg.cutoff),
        &["r", "cutoff", "f", "prediction", "leading_order", "estimate", "r_of_a", "cutoff_drift"],
        &table,
    )?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "experiment": "contact-sweep",
            "n": 3,
            "rows": rows,
            "slope_upper_half": slope,
            "slope_range": SLOPE_RANGE,
            "rel_error_first_nonzero": rel_first,
            "rel_error_largest_r": rel_last,
            "failures": failures,
        }),
    )?;
    Ok(failures)
}
