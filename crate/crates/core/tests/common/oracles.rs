//! Independent reference values used by several test targets.

use super::{random_form, rng};
use specflow_core::forms::{CurvatureInput, MixedForm, TrigPolyForm};
use specflow_core::math::PI;

pub fn random_curvature(n: usize, d: usize, seed: u64) -> CurvatureInput {
    let mut r = rng(seed);
    let raw = random_form(n, 2, d, 5, 1, &mut r);
    // Real part of the form, antisymmetric part of the fiber.
    let real = raw.add(&raw.conj()).unwrap().scale_real(0.5);
    let mut anti = TrigPolyForm::zero(n, 2, d);
    for (k, idx, coeff) in real.terms() {
        let m = coeff.sub(&coeff.transpose()).scale_real(0.5);
        anti.insert(k.clone(), idx, m).unwrap();
    }
    CurvatureInput::new(anti).unwrap()
}

/// `det(1 + x²/6)` by the Leibniz expansion over permutations of four
/// indices, in the commutative ring of even forms, followed by
/// `(1 + u)^{-1/2} = 1 - u/2 + 3u²/8`. Exact through degree 4.
pub fn ahat_degree_four_oracle(r: &CurvatureInput) -> TrigPolyForm {
    let n = r.dim();
    let x = r.form().scale_real(0.5);
    let x2 = x.wedge(&x).unwrap();
    let d = x.fiber();
    let entry = |i: usize, j: usize| -> MixedForm {
        let mut m = MixedForm::zero(n, 1);
        m.set_component(x2.fiber_entry(i, j).scale_real(1.0 / 6.0)).unwrap();
        if i == j {
            m = m.add(&MixedForm::one(n, 1)).unwrap();
        }
        m
    };
    let mut det = MixedForm::zero(n, 1);
    let mut perm: Vec<usize> = (0..d).collect();
    permutations(&mut perm, 0, &mut |p, sign| {
        let mut prod = MixedForm::one(n, 1);
        for (i, &pi) in p.iter().enumerate() {
            prod = prod.wedge(&entry(i, pi)).unwrap();
        }
        det = det.add(&prod.scale_real(sign)).unwrap();
    });
    let u = det.add(&MixedForm::one(n, 1).scale_real(-1.0)).unwrap();
    let u2 = u.wedge(&u).unwrap();
    let out = MixedForm::one(n, 1).add(&u.scale_real(-0.5)).unwrap().add(&u2.scale_real(0.375)).unwrap();
    out.component(4).clone()
}

fn permutations(p: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize], f64)) {
    if start == p.len() {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        visit(p, if inv % 2 == 0 { 1.0 } else { -1.0 });
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permutations(p, start + 1, visit);
        p.swap(start, i);
    }
}

/// `∫ μ ∧ cs` for the closed mixed form `μ = 1 + (ω + dβ)`.
pub fn pair_with_closed(cs: &MixedForm, seed: u64) -> f64 {
    let n = cs.dim();
    let mut r = rng(seed);
    let beta = random_form(n, 1, 1, 4, 1, &mut r);
    let beta = beta.add(&beta.conj()).unwrap().scale_real(0.5);
    let omega = TrigPolyForm::dx(n, 0).wedge(&TrigPolyForm::dx(n, 1)).unwrap().scale_real(0.7);
    let mut mu = MixedForm::one(n, 1);
    mu.set_component(omega.add(&beta.ext_d()).unwrap()).unwrap();
    let z = mu.wedge(cs).unwrap().component(n).integrate_top_scalar().unwrap();
    z.re + z.im
}

/// `Σ_k e^{-(2πk+θ)² t}` on the dual lattice:
/// `(4πt)^{-1/2} Σ_m e^{-m²/4t} cos(mθ)`.
pub fn poisson_theta(theta: f64, t: f64) -> f64 {
    let mut s = 1.0;
    for m in 1..200 {
        let mf = m as f64;
        s += 2.0 * (-mf * mf / (4.0 * t)).exp() * (mf * theta).cos();
    }
    s / (4.0 * PI * t).sqrt()
}

/// `Σ_k e^{-(2πk+θ)² t}` summed directly over the lattice.
pub fn direct_theta_sum(theta: f64, t: f64) -> f64 {
    (-2000..=2000).map(|k| (-(2.0 * PI * k as f64 + theta).powi(2) * t).exp()).sum()
}

/// Signed crossings of the circle eigenvalues `2πk + θ0 + 2πm s` through zero.
pub fn winding_crossings(theta0: f64, m: i32) -> i64 {
    let end = theta0 + 2.0 * PI * m as f64;
    let (lo, hi) = if end >= theta0 { (theta0, end) } else { (end, theta0) };
    let inside = (-200..=200).filter(|k: &i64| {
        let z = -2.0 * PI * *k as f64;
        lo < z && z < hi
    });
    inside.count() as i64 * m.signum() as i64
}
