//! Acceptance gate: runs each criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::oracles::{ahat_degree_four_oracle, pair_with_closed, poisson_theta, random_curvature, winding_crossings};
use common::{c, random_form, random_skew_one_form, rng};
use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::dirac::{
    assemble_window, cutoff_drift, eig, r_of_a, stable_cutoff, weitzenbock_residual, weitzenbock_residual_with,
    CliffordRep, EigenSystem,
};
use specflow_core::flow::{choose_params, estimator_flow, exact_flow, phi, phi_envelope, PathSpec};
use specflow_core::forms::{ahat_form, chs, chs_path, prediction, CurvatureInput, MixedForm, TrigPolyForm};
use specflow_core::heat::{count_eigs, heat_trace, p_lambda, pointwise_density_check, weyl_sweep};
use specflow_core::math::{least_squares_slope, PI, TAU};

const GAP: f64 = 1e-3;
const CONTACT_HOL: [f64; 3] = [0.31, -0.17, 0.05];
const SWEEP: [f64; 5] = [4.0, 6.0, 8.0, 12.0, 16.0];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn winding_path(m: i32) -> PathSpec {
    let a0 = Connection::flat(vec![PI]).unwrap();
    PathSpec::new(a0, TrigPolyForm::dx(1, 0).scale(c(0.0, TAU * m as f64)), 24, 6, GAP).unwrap()
}

/// Cutoff for the contact path at strength `r`: at least 8, grown with `r`,
/// then raised until the endpoint's trusted window is stable.
fn contact_cutoff(r: f64) -> usize {
    let end = contact_end(r);
    let start = 8usize.max((0.75 * r).ceil() as usize);
    stable_cutoff(&end, start, 40).unwrap().0
}

fn contact_end(r: f64) -> Connection {
    Connection::new(CONTACT_HOL.to_vec(), spin_c_increment(&contact_form(), r)).unwrap()
}

fn contact_path(r: f64, intervals: usize) -> PathSpec {
    let a0 = Connection::flat(CONTACT_HOL.to_vec()).unwrap();
    PathSpec::new(a0, spin_c_increment(&contact_form(), r), intervals, contact_cutoff(r), GAP).unwrap()
}

fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for m in -3..=3 {
        let path = winding_path(m);
        let f = exact_flow(&path).map_err(|e| e.to_string())?.f;
        let pred = prediction(path.start(), &path.end().unwrap(), &CurvatureInput::flat(1)).unwrap().value;
        let pred_int = pred.round() as i64;
        let exact = (pred - pred_int as f64).abs() < 1e-12;
        ok &= exact && f == m as i64 && pred_int == m as i64 && winding_crossings(PI, m) == f;
        lines.push(format!("m={m}: f={f} prediction={pred:.1}"));
    }
    check(ok, lines.join(", "))
}

fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut run = |name: String, path: PathSpec, rmax: f64, n_dim: usize| -> Result<(), String> {
        let f = exact_flow(&path).map_err(|e| e.to_string())?.f;
        let params = choose_params(rmax, n_dim).unwrap().clamp_to(path.layout().unwrap().trusted_window());
        let est = estimator_flow(&path, &params).map_err(|e| e.to_string())?;
        let pass = (f as f64 - est.value).abs() <= est.n as f64;
        ok &= pass;
        lines.push(format!("{name}: f={f} estimate={:.3} n={}", est.value, est.n));
        Ok(())
    };
    for m in -3..=3 {
        let path = winding_path(m);
        let rmax = r_of_a(path.start(), 8).unwrap();
        run(format!("winding m={m}"), winding_path(m), rmax, 1)?;
    }
    for r in [4.0, 8.0] {
        let path = contact_path(r, 32);
        let rmax = r_of_a(&path.end().unwrap(), 8).unwrap();
        run(format!("contact r={r}"), path, rmax, 3)?;
    }
    check(ok, lines.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rows = Vec::new();
    for r in SWEEP {
        let path = contact_path(r, 24);
        let f = exact_flow(&path).map_err(|e| e.to_string())?.f;
        let pred = prediction(path.start(), &path.end().unwrap(), &CurvatureInput::flat(3)).unwrap().value;
        rows.push((r, f, pred, path.cutoff()));
    }
    let table: Vec<String> = rows.iter().map(|(r, f, p, k)| format!("r={r} K={k} f={f} pred={p:.3}")).collect();
    let top: Vec<(f64, f64)> = rows[rows.len() - 3..].iter().filter(|x| x.1 != 0).map(|(r, f, _, _)| (r.ln(), (*f as f64).abs().ln())).collect();
    let slope = if top.len() == 3 { least_squares_slope(&top) } else { None };
    let rel = |row: &(f64, i64, f64, usize)| (row.1 as f64 / row.2 - 1.0).abs();
    let first_nonzero = rows.iter().find(|x| x.1 != 0);
    let improves = match first_nonzero {
        Some(first) => rel(rows.last().unwrap()) < rel(first),
        None => false,
    };
    let slope_ok = slope.map_or(false, |s| (1.8..=2.2).contains(&s));
    let detail = format!(
        "{}; slope over top three = {}; |f/pred-1|: smallest nonzero r {:.3}, largest r {:.3}",
        table.join(", "),
        slope.map_or("undefined".into(), |s| format!("{s:.3}")),
        first_nonzero.map_or(f64::NAN, rel),
        rel(rows.last().unwrap())
    );
    check(slope_ok && improves, detail)
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = f64::NEG_INFINITY;
    for r in [1.0, 1.5, 2.0, 2.5, 3.0] {
        for t in [1e-2f64, 1e-3, 1e-4, 1e-6] {
            let lhs = t.sqrt() * phi(r / t.sqrt(), t) - (PI / 4.0).sqrt();
            worst = worst.max(lhs.abs() - phi_envelope(r));
        }
    }
    check(worst <= 1e-12, format!("max(|lhs| - bound) = {worst:.3e} over R in [1,3], t in [1e-6,1e-2]"))
}

fn windowed(conn: &Connection, cutoff: usize) -> EigenSystem {
    eig(&assemble_window(conn, cutoff, TAU * cutoff as f64 / 4.0).unwrap()).unwrap()
}

fn criterion_5() -> Outcome {
    let cutoff = 12;
    let window = TAU * cutoff as f64 / 4.0;
    let lambdas: Vec<f64> = (0..40).map(|i| 1.0 + (window - 1.0) * i as f64 / 39.0).collect();
    let mut lines = Vec::new();
    let mut all = Vec::new();
    for (name, conn) in [
        ("free", Connection::flat(vec![0.0; 3]).unwrap()),
        ("holonomy", Connection::flat(vec![1.1, -2.4, 0.7]).unwrap()),
        ("contact r=8", contact_end(8.0)),
    ] {
        let r = r_of_a(&conn, 8).unwrap();
        let sweep = weyl_sweep(&windowed(&conn, cutoff), r, &lambdas).map_err(|e| e.to_string())?;
        let kappa = sweep.iter().map(|w| w.ratio).fold(0.0, f64::max);
        lines.push(format!("{name}: max ratio {kappa:.4}"));
        all.extend(sweep);
    }
    // One constant fitted on the lower half of the sweep must bound the whole sweep
    // within a factor 2 (harness choice).
    let kappa_low = all.iter().filter(|w| w.lambda <= window / 2.0).map(|w| w.ratio).fold(0.0, f64::max);
    let kappa_all = all.iter().map(|w| w.ratio).fold(0.0, f64::max);
    let bounded = kappa_all <= 2.0 * kappa_low;
    let circle = windowed(&Connection::flat(vec![0.0]).unwrap(), 40);
    let mut circle_ok = true;
    for i in 0..400 {
        let lambda = 1.0 + 0.15 * i as f64;
        if ((lambda / TAU) - (lambda / TAU).round()).abs() < 1e-9 {
            continue;
        }
        let expect = 2 * (lambda / TAU).floor() as usize + 1;
        circle_ok &= count_eigs(&circle, lambda).unwrap() == expect;
    }
    check(
        bounded && circle_ok,
        format!("{}; fitted κ = {kappa_low:.4}, sweep max {kappa_all:.4}; circle counts exact: {circle_ok}", lines.join(", ")),
    )
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for (hol, t) in [
        (vec![0.0], 1e-2),
        (vec![0.0], 1e-3),
        (vec![0.8], 1e-3),
        (vec![0.0, 0.0, 0.0], 1e-2),
        (vec![0.0, 0.0, 0.0], 1e-3),
        (vec![0.3, -1.2, 2.0], 1e-3),
    ] {
        // Smallest cutoff whose trusted window certifies the truncation at t.
        let window = (-(1e-16f64).ln() / t).sqrt();
        let cutoff = (4.0 * window / TAU).ceil() as usize;
        let conn = Connection::flat(hol.clone()).unwrap();
        let got = heat_trace(&windowed(&conn, cutoff), t).map_err(|e| e.to_string())?.value;
        let spin = if hol.len() == 1 { 1.0 } else { 2.0 };
        let expect: f64 = spin * hol.iter().map(|th| poisson_theta(*th, t)).product::<f64>();
        let rel = (got / expect - 1.0).abs();
        worst = worst.max(rel);
        lines.push(format!("n={} t={t:e} K={cutoff}: rel {rel:.1e}", hol.len()));
    }
    check(worst <= 1e-6, lines.join(", "))
}

fn criterion_7() -> Outcome {
    let theta = 0.7;
    let cst = 1.3;
    let conn = Connection::flat(vec![theta]).unwrap();
    let sys = windowed(&conn, 60);
    let ahat = TrigPolyForm::dx(1, 0).scale(c(0.0, cst));
    let ts = [0.2, 0.1, 0.05, 0.025];
    let mut residuals = Vec::new();
    for t in ts {
        let p = p_lambda(&conn, &sys, &ahat, t, TAU * 60.0 / 4.0).map_err(|e| e.to_string())?;
        residuals.push((p.p * t.sqrt() - p.density * t.sqrt()).abs());
    }
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    // Contact pointwise residual against both candidate exponents (logged only).
    let contact = Connection::new(CONTACT_HOL.to_vec(), spin_c_increment(&contact_form(), 1.0)).unwrap();
    let csys = windowed(&contact, 28);
    let vel = spin_c_increment(&contact_form(), 1.0);
    let mut pts = Vec::new();
    for t in [0.08, 0.04, 0.02] {
        let (lhs, rhs) = pointwise_density_check(&contact, &csys, &vel, t, &[0.1, 0.2, 0.3]).map_err(|e| e.to_string())?;
        pts.push((t.ln(), (lhs - rhs).abs().ln()));
    }
    let slope = least_squares_slope(&pts).unwrap_or(f64::NAN);
    let nearer = if (slope - 0.5).abs() <= (slope - 1.5).abs() { "t^{1/2}" } else { "t^{3/2}" };
    check(
        monotone,
        format!(
            "n=1 residuals {:?}; contact pointwise residual slope {slope:.3} (candidates 0.5 and 1.5, nearer {nearer})",
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut fails = Vec::new();
    let mut r = rng(2024);
    for trial in 0..24 {
        let p = trial % 4;
        let q = (trial / 4) % 3;
        let a = random_form(5, p, 2, 4, 2, &mut r);
        let b = random_form(5, q, 2, 4, 2, &mut r);
        let scale = (TAU * 3.0).powi(2) * a.max_coefficient();
        if a.ext_d().ext_d().max_coefficient() > 1e-15 * scale {
            fails.push("d²");
        }
        let lhs = a.wedge(&b).unwrap().ext_d();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.ext_d().wedge(&b).unwrap().add(&a.wedge(&b.ext_d()).unwrap().scale_real(sign)).unwrap();
        if lhs.sub(&rhs).unwrap().max_coefficient() > 1e-13 * lhs.max_coefficient().max(1.0) {
            fails.push("Leibniz");
        }
        let sa = random_form(5, p, 1, 4, 2, &mut r);
        let sb = random_form(5, q, 1, 4, 2, &mut r);
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        if sa.wedge(&sb).unwrap().sub(&sb.wedge(&sa).unwrap().scale_real(sign)).unwrap().max_coefficient() > 1e-13 {
            fails.push("graded commutativity");
        }
        let st = random_form(3, 2, 1, 5, 2, &mut r);
        if st.ext_d().integrate_top_scalar().unwrap() != c(0.0, 0.0) {
            fails.push("Stokes");
        }
    }
    for (fiber, seed) in [(1usize, 21u64), (2, 22)] {
        let mut r = rng(seed);
        let a0 = Connection::new(vec![0.3, -0.2, 0.5], random_skew_one_form(3, fiber, 4, 1, &mut r)).unwrap();
        let mid = Connection::new(vec![1.1, 0.4, -0.3], random_skew_one_form(3, fiber, 4, 1, &mut r)).unwrap();
        let a1 = Connection::new(vec![-0.6, 0.9, 0.2], random_skew_one_form(3, fiber, 4, 1, &mut r)).unwrap();
        let straight = pair_with_closed(&chs(&a0, &a1).unwrap(), seed);
        let detour = pair_with_closed(&chs_path(&[a0, mid, a1]).unwrap(), seed);
        if (straight - detour).abs() > 1e-10 * straight.abs().max(1.0) {
            fails.push("chs path independence");
        }
    }
    if ahat_form(&CurvatureInput::flat(5)).unwrap() != MixedForm::one(5, 1) {
        fails.push("Â(0) = 1");
    }
    for seed in [1, 2, 3] {
        let rc = random_curvature(5, 4, seed);
        let oracle = ahat_degree_four_oracle(&rc);
        let diff = ahat_form(&rc).unwrap().component(4).sub(&oracle).unwrap().max_coefficient();
        if diff > 1e-12 * oracle.max_coefficient().max(1.0) {
            fails.push("Â degree 4");
        }
    }
    let mut r = rng(31);
    let a0 = Connection::new(vec![0.3, 0.1, -0.4], random_skew_one_form(3, 1, 4, 2, &mut r)).unwrap();
    let a1 = Connection::new(vec![-0.2, 0.5, 0.7], random_skew_one_form(3, 1, 4, 2, &mut r)).unwrap();
    let flat = CurvatureInput::flat(3);
    let fwd = prediction(&a0, &a1, &flat).unwrap().value;
    let back = prediction(&a1, &a0, &flat).unwrap().value;
    if (fwd + back).abs() > 1e-10 * fwd.abs().max(1.0) {
        fails.push("prediction antisymmetry");
    }
    fails.dedup();
    check(fails.is_empty(), if fails.is_empty() { "all identities hold".into() } else { format!("failed: {fails:?}") })
}

fn criterion_9() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut residual: f64 = 0.0;
    for r in SWEEP {
        let end = contact_end(r);
        let k = contact_cutoff(r);
        let drift = cutoff_drift(&end, k).map_err(|e| e.to_string())?;
        let sys = windowed(&end, k);
        residual = residual.max(sys.max_residual()).max(sys.max_orthogonality());
        ok &= drift <= 1e-8;
        lines.push(format!("r={r} K={k} drift {drift:.1e}"));
    }
    ok &= residual <= 1e-9;
    let contact = Connection::new(vec![0.3, -0.8, 1.7], contact_form()).unwrap();
    let w = weitzenbock_residual(&contact, 6, 3, 3).map_err(|e| e.to_string())?;
    let rep = CliffordRep::standard(3).unwrap();
    let control = (0..3)
        .map(|j| weitzenbock_residual_with(&contact, 6, 2, 4, &rep.with_flipped(j), &rep).unwrap())
        .fold(f64::INFINITY, f64::min);
    ok &= w <= 1e-8 && control > 1.0;
    check(
        ok,
        format!("{}; max eigen residual {residual:.1e}; Weitzenböck {w:.1e}, negative control {control:.2}", lines.join(", ")),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("winding oracle", criterion_1, Duration::from_secs(5)),
        ("estimator certificate", criterion_2, Duration::from_secs(120)),
        ("asymptotic slope", criterion_3, Duration::from_secs(1800)),
        ("mollifier bound", criterion_4, Duration::from_secs(1)),
        ("Weyl count boundedness", criterion_5, Duration::from_secs(120)),
        ("heat-trace oracle", criterion_6, Duration::from_secs(60)),
        ("density convergence", criterion_7, Duration::from_secs(300)),
        ("algebra suite", criterion_8, Duration::from_secs(30)),
        ("numerical certificates", criterion_9, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = if elapsed > *budget { format!(" (over the {budget:?} budget)") } else { String::new() };
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{elapsed:.2?}{over}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{elapsed:.2?}{over}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
