//! Circle paths `A_s = A_0 + s·2πi m dx`: the flow must equal the winding
//! number, the prediction must equal it too, and the estimator must land
//! within `n` of it.

use serde::Serialize;
use specflow_core::dirac::r_of_a;
use specflow_core::flow::{estimator_flow, exact_flow, PathSpec};
use specflow_core::forms::{prediction, CurvatureInput, TrigPolyForm};
use specflow_core::math::TAU;
use specflow_core::C64;

use super::{estimator_params, starting_connection, write_wp_csv, EstimatorJson, Failures, FlowJson};
use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

#[derive(Serialize)]
struct Row {
    m: i32,
    flow: FlowJson,
    prediction: f64,
    estimator: EstimatorJson,
}

pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> Result<Failures, RunError> {
    let a0 = starting_connection(cfg)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &m in &cfg.winding {
        let v = TrigPolyForm::dx(1, 0).scale(C64::new(0.0, TAU * m as f64));
        let path = PathSpec::new(a0.clone(), v, cfg.intervals, cfg.cutoff, cfg.gap)?;
        let flow = exact_flow(&path)?;
        let pred = prediction(path.start(), &path.end()?, &CurvatureInput::flat(1))?.value;
        let rmax = r_of_a(&a0, 8)?.max(r_of_a(&path.end()?, 8)?);
        let params = estimator_params(cfg, rmax, 1, path.layout()?.trusted_window())?;
        let est = estimator_flow(&path, &params)?;
        if flow.f != m as i64 {
            failures.push(format!("m = {m}: exact flow {}", flow.f));
        }
        if (pred - m as f64).abs() > 1e-9 {
            failures.push(format!("m = {m}: prediction {pred}"));
        }
        if (est.value - m as f64).abs() > est.n as f64 {
            failures.push(format!("m = {m}: estimate {} further than n = {} from m", est.value, est.n));
        }
        let params_line = format!(
            "winding m={m} n=1 K={} intervals={} gap={} t={} R={} T={}",
            cfg.cutoff, cfg.intervals, cfg.gap, params.t, params.r, params.big_t
        );
        write_wp_csv(out, &format!("wp_m{m}.csv"), &params_line, &est)?;
        table.push(vec![m.to_string(), flow.f.to_string(), num(pred), num(est.value), est.n.to_string()]);
        rows.push(Row { m, flow: (&flow).into(), prediction: pred, estimator: (&est).into() });
    }
    out.write_csv(
        "winding.csv",
        &format!("winding n=1 K={} intervals={} hol={:?}", cfg.cutoff, cfg.intervals, cfg.hol),
        &["m", "f", "prediction", "estimate", "n"],
        &table,
    )?;
    out.write_json(
        "summary.json",
        &serde_json::json!({ "experiment": "winding", "n": 1, "rows": rows, "failures": failures }),
    )?;
    Ok(failures)
}
