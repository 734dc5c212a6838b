//! Heat-side diagnostics: the free trace against its Poisson sum, kernel
//! positivity and growth, eigenvalue counts, and the weighted trace
//! against its form density.

use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::dirac::{assemble_window, eig, r_of_a, EigenSystem};
use specflow_core::forms::TrigPolyForm;
use specflow_core::heat::{
    diag_kernel, fit_kernel_bound, heat_trace, log_spaced, min_admissible_t, p_lambda, poisson_free_trace, psd_defect,
    uniform_points, weyl_sweep, PSD_TOL,
};
use specflow_core::math::TAU;
use specflow_core::C64;

use super::{starting_connection, Failures};
use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

/// Contact connections are only examined at `t` above this: smaller times
/// need cutoffs far beyond desk scale.
pub const CONTACT_T_MIN: f64 = 0.02;
/// Relative tolerance of the free trace against the Poisson sum.
pub const FREE_TRACE_TOL: f64 = 1e-6;
const KERNEL_TIMES: usize = 6;
/// Bound on the fitted kernel constant.
pub const KAPPA_MAX: f64 = 10.0;

fn windowed(conn: &Connection, cutoff: usize) -> Result<EigenSystem, RunError> {
    Ok(eig(&assemble_window(conn, cutoff, TAU * cutoff as f64 / 4.0)?)?)
}

/// Smallest cutoff whose trusted window admits heat time `t`.
fn cutoff_for(t: f64) -> usize {
    let window = (min_admissible_t(1.0) / t).sqrt();
    (4.0 * window / TAU).ceil() as usize
}

pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> Result<Failures, RunError> {
    let mut failures = Vec::new();
    let mut traces = Vec::new();
    let mut weyl = Vec::new();
    let mut density = Vec::new();
    let start = starting_connection(cfg)?;
    let n = cfg.n;

    // Free trace with the configured holonomy.
    let mut worst_free: f64 = 0.0;
    for &t in &cfg.heat_times {
        let k = cutoff_for(t);
        let sys = windowed(&Connection::flat(cfg.hol.clone())?, k)?;
        let got = heat_trace(&sys, t)?.value;
        let expect = poisson_free_trace(&cfg.hol, t);
        let rel = (got / expect - 1.0).abs();
        worst_free = worst_free.max(rel);
        traces.push(vec![format!("flat hol={:?}", cfg.hol), num(t), k.to_string(), num(got), num(expect), String::new(), String::new()]);
    }
    if worst_free > FREE_TRACE_TOL {
        failures.push(format!("free trace relative error {worst_free:.2e} exceeds {FREE_TRACE_TOL:e}"));
    }

    // Connections for the kernel and count checks.
    let mut conns = vec![("trivial".to_string(), Connection::flat(vec![0.0; n])?), ("start".to_string(), start.clone())];
    if n == 3 {
        for &r in &cfg.r_sweep {
            let osc = start.oscillatory().add(&spin_c_increment(&contact_form(), r))?;
            conns.push((format!("contact r={r}"), Connection::new(start.holonomy().to_vec(), osc)?));
        }
    }
    let contact_times: Vec<f64> = cfg.heat_times.iter().copied().filter(|&t| t >= CONTACT_T_MIN).collect();
    let kernel_cutoff = contact_times.iter().map(|&t| cutoff_for(t)).max().unwrap_or(0).max(cfg.cutoff);
    // The kernel bound is fitted on a log-spaced sweep down to the smallest
    // admissible time.
    let t_lo = contact_times.iter().copied().fold(1.0, f64::min);
    let kernel_times = log_spaced(t_lo.max(min_admissible_t(TAU * kernel_cutoff as f64 / 4.0)), 1.0, KERNEL_TIMES)?;
    let points = uniform_points(n, if n == 3 { 3 } else { 16 });
    let mut kappa_low: f64 = 0.0;
    let mut kappa_all: f64 = 0.0;
    for (name, conn) in &conns {
        let r = r_of_a(conn, 8)?;
        let sys = windowed(conn, kernel_cutoff)?;
        let mut samples = Vec::new();
        for &t in &kernel_times {
            let tr = heat_trace(&sys, t)?.value;
            let mut sup: f64 = 0.0;
            for x in &points {
                let k = diag_kernel(&sys, t, x)?;
                let defect = psd_defect(&k)?;
                if defect > PSD_TOL {
                    failures.push(format!("{name}: kernel at t = {t}, x = {x:?} not positive (defect {defect:.2e})"));
                }
                sup = sup.max(k.frobenius());
            }
            samples.push((t, sup, tr));
        }
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.1)).collect();
        let fit = fit_kernel_bound(&pairs, n, r);
        if !(fit.kappa.is_finite() && fit.kappa < KAPPA_MAX) {
            failures.push(format!("{name}: kernel bound constant {} with c = {}", fit.kappa, fit.c));
        }
        for (t, sup, tr) in samples {
            let envelope = (4.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0) * (fit.c * r * t).exp();
            traces.push(vec![name.clone(), num(t), kernel_cutoff.to_string(), num(tr), String::new(), num(sup), num(sup / envelope)]);
        }

        // Counts on the lower and full halves of the window.
        let counts_sys = windowed(conn, cfg.cutoff)?;
        let w = TAU * cfg.cutoff as f64 / 4.0;
        let lambdas: Vec<f64> = (0..40).map(|i| 1.0 + (w - 1.0) * i as f64 / 39.0).collect();
        for s in weyl_sweep(&counts_sys, r, &lambdas)? {
            if s.lambda <= w / 2.0 {
                kappa_low = kappa_low.max(s.ratio);
            }
            kappa_all = kappa_all.max(s.ratio);
            weyl.push(vec![name.clone(), num(s.lambda), s.count.to_string(), num(s.ratio)]);
        }

        // Weighted trace against the density where r t <= 1.
        if n == 3 && name.starts_with("contact") {
            let vel = spin_c_increment(&contact_form(), 1.0);
            for &t in contact_times.iter().filter(|&&t| r * t <= 1.0) {
                let p = p_lambda(conn, &sys, &vel, t, TAU * kernel_cutoff as f64 / 4.0)?;
                density.push(vec![name.clone(), num(t), num(p.p), num(p.density), num(p.residual)]);
            }
        }
    }
    if kappa_all > 2.0 * kappa_low {
        failures.push(format!("Weyl ratio {kappa_all:.3} exceeds twice the lower-window constant {kappa_low:.3}"));
    }

    // Circle with constant velocity: the residual of √t·P must fall with t.
    let theta = 0.7;
    let circle = Connection::flat(vec![theta])?;
    let circle_sys = windowed(&circle, 60)?;
    let vel = TrigPolyForm::dx(1, 0).scale(C64::new(0.0, 1.3));
    let mut prev = f64::INFINITY;
    for t in [0.2, 0.1, 0.05, 0.025] {
        let p = p_lambda(&circle, &circle_sys, &vel, t, TAU * 15.0)?;
        let scaled = (p.residual * t.sqrt()).abs();
        if scaled >= prev {
            failures.push(format!("circle: scaled residual {scaled:.3e} at t = {t} did not fall"));
        }
        prev = scaled;
        density.push(vec![format!("circle theta={theta}"), num(t), num(p.p), num(p.density), num(p.residual)]);
    }

    let params = format!("heat-check n={n} hol={:?} cutoff={} kernel_cutoff={kernel_cutoff}", cfg.hol, cfg.cutoff);
    out.write_csv("trace.csv", &params, &["connection", "t", "cutoff", "trace", "poisson", "kernel_sup", "bound_ratio"], &traces)?;
    out.write_csv("weyl.csv", &params, &["connection", "lambda", "count", "weyl_ratio"], &weyl)?;
    out.write_csv("density.csv", &params, &["connection", "t", "p_lambda", "density", "residual"], &density)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "experiment": "heat-check",
            "n": n,
            "free_trace_max_rel_error": worst_free,
            "weyl_kappa_lower_half": kappa_low,
            "weyl_kappa_full": kappa_all,
            "kernel_cutoff": kernel_cutoff,
            "contact_times": contact_times,
            "kernel_times": kernel_times,
            "failures": failures,
        }),
    )?;
    Ok(failures)
}
