mod common;

use common::oracles::winding_crossings;
use common::{c, rng};
use proptest::prelude::*;
use rand::Rng;
use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::forms::{prediction, CurvatureInput, IndexSet, Momentum, TrigPolyForm};
use specflow_core::linalg::CMat;
use specflow_core::flow::{
    choose_params, estimator_flow, eta_difference, exact_flow, phi, phi_envelope, simpson, wp, wp_with_window,
    EstimatorParams, PathSpec, CROSSING_TOL,
};
use specflow_core::math::{E, PI};
use specflow_core::Error;

const GAP: f64 = 1e-3;

fn winding_path(theta0: f64, m: i32, intervals: usize) -> PathSpec {
    let a0 = Connection::flat(vec![theta0]).unwrap();
    let v = TrigPolyForm::dx(1, 0).scale(c(0.0, 2.0 * PI * m as f64));
    PathSpec::new(a0, v, intervals, 6, GAP).unwrap()
}

fn contact_path(hol: Vec<f64>, r: f64, intervals: usize, cutoff: usize) -> PathSpec {
    let a0 = Connection::flat(hol).unwrap();
    PathSpec::new(a0, spin_c_increment(&contact_form(), r), intervals, cutoff, GAP).unwrap()
}

#[test]
fn constant_path_has_no_flow() {
    let a0 = Connection::flat(vec![0.4, -1.1, 2.0]).unwrap();
    let path = PathSpec::new(a0, TrigPolyForm::zero(3, 1, 1), 4, 3, GAP).unwrap();
    let res = exact_flow(&path).unwrap();
    assert_eq!(res.f, 0);
    assert!(res.crossings.is_empty());
    assert_eq!(res.inertia_flow, 0);
}

#[test]
fn winding_path_flow_equals_winding_number() {
    for m in -3..=3 {
        for theta0 in [0.5, PI, 5.9] {
            let path = winding_path(theta0, m, 12);
            let res = exact_flow(&path).unwrap();
            assert_eq!(res.f, winding_crossings(theta0, m), "m = {m}, θ0 = {theta0}");
            assert_eq!(res.f, m as i64);
            assert_eq!(res.inertia_flow, res.f);
            let sum: i64 = res.crossings.iter().map(|x| x.sign as i64 * x.multiplicity as i64).sum();
            assert_eq!(sum, res.f);
            for x in &res.crossings {
                assert!(x.lambda.abs() <= CROSSING_TOL);
                assert_eq!(x.sign as f64, x.slope.signum());
                // Crossing where θ0 + 2πm s is a multiple of 2π.
                let theta = theta0 + 2.0 * PI * m as f64 * x.s;
                let frac = theta / (2.0 * PI) - (theta / (2.0 * PI)).round();
                assert!(frac.abs() < 1e-9, "crossing at s = {}", x.s);
            }
            let pred = prediction(path.start(), &path.end().unwrap(), &CurvatureInput::flat(1)).unwrap();
            assert!((pred.value - m as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn endpoint_zero_mode_is_rejected() {
    let path = winding_path(0.0, 1, 8);
    assert!(matches!(exact_flow(&path), Err(Error::EndpointZeroMode { .. })));
}

#[test]
fn holonomy_sweep_through_lattice_point_cancels() {
    // θ(s) = (s - 0.37)·v passes through 0; the ±|θ| branches swap.
    let v = [1.3, -0.7, 0.9];
    let a0 = Connection::flat(v.iter().map(|x| -0.37 * x).collect()).unwrap();
    let mut vel = TrigPolyForm::zero(3, 1, 1);
    for (j, x) in v.iter().enumerate() {
        vel = vel.add(&TrigPolyForm::dx(3, j).scale(c(0.0, *x))).unwrap();
    }
    let path = PathSpec::new(a0, vel, 10, 3, GAP).unwrap();
    let res = exact_flow(&path).unwrap();
    assert_eq!(res.f, 0);
    assert_eq!(res.inertia_flow, 0);
    let plus: usize = res.crossings.iter().filter(|x| x.sign > 0).map(|x| x.multiplicity).sum();
    let minus: usize = res.crossings.iter().filter(|x| x.sign < 0).map(|x| x.multiplicity).sum();
    assert_eq!((plus, minus), (1, 1), "{:?}", res.crossings);
    for x in &res.crossings {
        assert!((x.s - 0.37).abs() < 1e-8);
    }
}

#[test]
fn contact_flow_is_grid_stable_and_matches_inertia() {
    for r in [4.0, 8.0] {
        let path = contact_path(vec![0.31, -0.17, 0.05], r, 12, 9);
        let res = exact_flow(&path).unwrap();
        let finer = exact_flow(&path.refined()).unwrap();
        assert_eq!(res.f, finer.f);
        assert_eq!(res.f, res.inertia_flow);
        let back = exact_flow(&path.reversed().unwrap()).unwrap();
        assert_eq!(back.f, -res.f);
    }
}

/// Random connection whose oscillation depends on the last coordinate only,
/// so the operator keeps small blocks.
fn random_connection(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Connection {
    let hol = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut osc = TrigPolyForm::zero(n, 1, 1);
    for _ in 0..3 {
        let mut k = vec![0; n];
        k[n - 1] = rng.gen_range(1..=2);
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let j = rng.gen_range(0..n);
        let up = TrigPolyForm::monomial(Momentum(k.clone()), IndexSet::single(j), CMat::scalar(z)).unwrap();
        let down = up.fiber_adjoint().scale_real(-1.0);
        osc = osc.add(&up).unwrap().add(&down).unwrap();
    }
    let osc = osc.scale_real(rng.gen_range(0.5..4.0));
    Connection::new(hol, osc).unwrap()
}

fn gapped(conn: &Connection, cutoff: usize) -> bool {
    let v = specflow_core::dirac::windowed_spectrum(conn, cutoff, 0.2).unwrap();
    v.is_empty()
}

#[test]
fn flow_is_additive_and_antisymmetric() {
    let mut r = rng(11);
    let mut checked = 0;
    let mut nonzero = 0;
    for n in [1usize, 3] {
        let cutoff = if n == 1 { 10 } else { 6 };
        while checked < if n == 1 { 6 } else { 10 } {
            let pts: Vec<Connection> = (0..3).map(|_| random_connection(n, &mut r)).collect();
            if !pts.iter().all(|p| gapped(p, cutoff)) {
                continue;
            }
            let flow = |a: &Connection, b: &Connection| exact_flow(&PathSpec::between(a, b, 16, cutoff, GAP).unwrap()).unwrap();
            let f01 = flow(&pts[0], &pts[1]);
            let f12 = flow(&pts[1], &pts[2]);
            let f02 = flow(&pts[0], &pts[2]);
            let f10 = flow(&pts[1], &pts[0]);
            assert_eq!(f01.f + f12.f, f02.f, "n = {n}");
            assert_eq!(f10.f, -f01.f);
            for res in [&f01, &f12, &f02, &f10] {
                assert_eq!(res.f, res.inertia_flow);
            }
            nonzero += (f02.f != 0) as usize;
            checked += 1;
        }
    }
    assert!(nonzero >= 3, "only {nonzero} paths with nonzero flow");
}

#[test]
fn phi_examples() {
    for t in [1e-4, 1e-2, 1.0, 7.0] {
        assert_eq!(phi(0.0, t), 0.0);
        for lam in [0.1, 1.0, 13.0, 250.0] {
            assert_eq!(phi(-lam, t), -phi(lam, t));
            // Strict until erf saturates in double precision.
            assert!(phi(lam * 1.01, t) >= phi(lam, t));
            if lam * t.sqrt() < 3.0 {
                assert!(phi(lam * 1.01, t) > phi(lam, t));
            }
        }
    }
    // Against a plain midpoint quadrature of e^{-p² t}.
    let (lam, t) = (2.5, 0.3);
    let m = 200_000;
    let h = lam / m as f64;
    let quad: f64 = (0..m).map(|i| (-((i as f64 + 0.5) * h).powi(2) * t).exp() * h).sum();
    assert!((phi(lam, t) - quad).abs() < 1e-10);
}

#[test]
fn phi_envelope_holds() {
    for rr in [1.0, 2.0, 3.0] {
        for t in [1e-2f64, 1e-4] {
            let lhs = t.sqrt() * phi(rr / t.sqrt(), t) - (PI / 4.0).sqrt();
            assert!(lhs.abs() <= phi_envelope(rr) + 1e-12, "R = {rr}, t = {t}");
        }
    }
}

proptest! {
    #[test]
    fn phi_is_odd_and_increasing(lam in -50.0f64..50.0, d in 1e-3f64..5.0, t in 1e-3f64..10.0) {
        prop_assert_eq!(phi(-lam, t), -phi(lam, t));
        prop_assert!(phi(lam + d, t) >= phi(lam, t));
        prop_assert!(phi(lam, t).abs() <= (PI / (4.0 * t)).sqrt() + 1e-15);
    }
}

#[test]
fn choose_params_examples() {
    let p = choose_params(E, 3).unwrap();
    assert!((p.r - 1.0).abs() < 1e-15);
    assert!((p.t - E.powf(-(1.0 + 0.125))).abs() < 1e-15);
    let p = choose_params(100.0, 3).unwrap();
    assert_eq!(p.q, 0.125);
    assert!((p.t - 100f64.powf(-9.0 / 8.0)).abs() < 1e-15);
    assert!((p.r - 100f64.ln()).abs() < 1e-15);
    let p = choose_params(1.5, 1).unwrap();
    assert_eq!((p.t, p.r), (1.0 / 3.0, 1.0));
    assert!(!p.warnings.is_empty());
}

#[test]
fn choose_params_keeps_rt_at_most_one() {
    let mut prev = f64::INFINITY;
    for i in 0..=60 {
        let rmax = 10f64.powf(i as f64 / 10.0);
        for n in [1, 3] {
            let p = choose_params(rmax, n).unwrap();
            assert!(p.rt().unwrap() <= 1.0, "rmax = {rmax}");
            assert!(p.r >= 1.0 && p.q > 0.0 && p.q < 1.0 / (n as f64 + 1.0));
        }
        // For r >= e, rt = r^{-q} decreases.
        if rmax >= E {
            let rt = choose_params(rmax, 3).unwrap().rt().unwrap();
            assert!(rt <= prev);
            prev = rt;
        }
    }
}

#[test]
fn clamp_fits_trusted_window() {
    let p = choose_params(1e4, 3).unwrap().clamp_to(10.0);
    assert!(p.clamped && p.window <= 10.0 + 1e-12 && p.r >= 1.0);
    let p = EstimatorParams::new(1e-4, 1.0, 0.1).unwrap().clamp_to(10.0);
    assert!(p.clamped && (p.t - 0.01).abs() < 1e-15 && p.r == 1.0);
    let untouched = EstimatorParams::new(0.5, 1.0, 0.1).unwrap();
    assert_eq!(untouched.clone().clamp_to(10.0), untouched);
}

#[test]
fn simpson_is_exact_for_cubics() {
    let f = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x - 0.5 * x * x * x;
    let exact = 1.0 - 1.0 + 1.0 - 0.125;
    for xs in [
        vec![0.0, 0.3, 0.45, 0.8, 1.0],
        vec![0.0, 0.5, 1.0],
        vec![0.0, 0.1, 0.25, 0.5, 0.7, 0.95, 1.0],
    ] {
        let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
        let got = simpson(&xs, &ys);
        // Pairs integrate cubics exactly on uniform pairs only; quadratics always.
        let q = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x;
        let yq: Vec<f64> = xs.iter().map(|x| q(*x)).collect();
        assert!((simpson(&xs, &yq) - 1.0).abs() < 1e-14);
        assert!((got - exact).abs() < 1e-2);
    }
    let xs: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    assert!((simpson(&xs, &ys) - exact).abs() < 1e-14);
}

#[test]
fn zero_velocity_gives_zero_estimate() {
    let a0 = Connection::new(vec![0.5, 0.2, -0.4], contact_form()).unwrap();
    let path = PathSpec::new(a0, TrigPolyForm::zero(3, 1, 1), 4, 6, GAP).unwrap();
    let params = EstimatorParams::new(0.05, 2.0, 0.125).unwrap();
    let est = estimator_flow(&path, &params).unwrap();
    assert_eq!(est.value, 0.0);
    assert!(est.n > 0);
    assert!(est.samples.iter().all(|w| w.wp == 0.0));
}

#[test]
fn winding_estimate_is_within_n() {
    for m in [-3, -1, 2, 3] {
        let path = winding_path(PI, m, 64);
        let f = exact_flow(&path).unwrap().f;
        let params = choose_params(1.0, 1).unwrap().clamp_to(path.layout().unwrap().trusted_window());
        let est = estimator_flow(&path, &params).unwrap();
        assert!((f as f64 - est.value).abs() <= est.n as f64, "m = {m}: {} vs {f}, n = {}", est.value, est.n);
    }
}

#[test]
fn contact_estimate_is_within_n() {
    for r in [4.0, 8.0] {
        let path = contact_path(vec![0.31, -0.17, 0.05], r, 32, 9);
        let f = exact_flow(&path).unwrap().f;
        let rmax = specflow_core::dirac::r_of_a(&path.end().unwrap(), 8).unwrap();
        let params = choose_params(rmax, 3).unwrap().clamp_to(path.layout().unwrap().trusted_window());
        let est = estimator_flow(&path, &params).unwrap();
        assert!((f as f64 - est.value).abs() <= est.n as f64, "r = {r}: f = {f}, estimate {}, n = {}", est.value, est.n);
    }
}

#[test]
fn truncation_error_within_heat_envelope() {
    let path = contact_path(vec![0.31, -0.17, 0.05], 3.0, 4, 8);
    let layout = path.layout().unwrap();
    let trusted = layout.trusted_window();
    let params = EstimatorParams::new(0.02, 1.2, 0.125).unwrap();
    let amp = path.velocity().coefficient_l1();
    for s in [0.0, 0.4, 1.0] {
        let cut = wp(&path, &layout, s, &params).unwrap();
        let full = wp_with_window(&path, &layout, s, &params, trusted).unwrap();
        // Heat trace at t/2 over the same eigenvalues.
        let conn = path.at(s).unwrap();
        let vals = specflow_core::dirac::windowed_spectrum(&conn, layout.cutoff(), trusted).unwrap();
        let heat: f64 = vals.iter().map(|l| (-l * l * params.t / 2.0).exp()).sum();
        let bound = (-params.r * params.r / 2.0).exp() * heat * amp / (2.0 * params.big_t);
        assert!((cut.wp - full.wp).abs() <= bound, "s = {s}: {} vs bound {bound}", (cut.wp - full.wp).abs());
        assert!(full.n_s > cut.n_s);
    }
}

#[test]
fn eta_difference_examples() {
    let path = contact_path(vec![0.31, -0.17, 0.05], 0.0, 4, 4);
    let res = exact_flow(&path).unwrap();
    assert_eq!(eta_difference(&path, &res, &CurvatureInput::flat(3)).unwrap(), 0.0);
    // Gauge pair on the circle: prediction equals the flow exactly.
    for m in [-2, 1, 3] {
        let path = winding_path(0.7, m, 12);
        let res = exact_flow(&path).unwrap();
        let eta = eta_difference(&path, &res, &CurvatureInput::flat(1)).unwrap();
        assert!(eta.abs() < 1e-12, "m = {m}: {eta}");
    }
}
