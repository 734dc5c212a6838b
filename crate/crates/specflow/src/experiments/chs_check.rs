//! Seeded property suite for the forms algebra and the Chern-Simons
//! prediction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specflow_core::connection::{contact_form, spin_c_increment, Connection};
use specflow_core::forms::{
    ahat_form, chs, chs_path, leading_order, prediction, CurvatureInput, IndexSet, MixedForm, Momentum, TrigPolyForm,
};
use specflow_core::linalg::CMat;
use specflow_core::math::TAU;
use specflow_core::C64;

use super::Failures;
use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, OutputDir};

const TRIALS: usize = 24;

fn random_form(n: usize, degree: usize, fiber: usize, terms: usize, radius: i32, rng: &mut ChaCha8Rng) -> TrigPolyForm {
    let sets: Vec<IndexSet> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == degree)
        .map(|m| IndexSet::from_indices(&(0..n).filter(|j| m & (1 << j) != 0).collect::<Vec<_>>()).expect("in range"))
        .collect();
    let mut f = TrigPolyForm::zero(n, degree, fiber);
    for _ in 0..terms {
        let k = Momentum((0..n).map(|_| rng.gen_range(-radius..=radius)).collect());
        let idx = sets[rng.gen_range(0..sets.len())];
        let m = CMat::from_fn(fiber, fiber, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        f.insert(k, idx, m).expect("shapes match");
    }
    f
}

/// `u(fiber)`-valued 1-form without zero mode.
fn random_skew(n: usize, fiber: usize, rng: &mut ChaCha8Rng) -> TrigPolyForm {
    let f = random_form(n, 1, fiber, 4, 1, rng).oscillatory_part();
    f.sub(&f.fiber_adjoint()).expect("same shape").scale_real(0.5)
}

/// Real number from pairing a mixed form with a closed form, so that exact
/// differences integrate to zero.
fn pair_with_closed(cs: &MixedForm, rng: &mut ChaCha8Rng) -> Result<f64, RunError> {
    let n = cs.dim();
    let beta = random_form(n, 1, 1, 4, 1, rng);
    let beta = beta.add(&beta.conj())?.scale_real(0.5);
    let omega = TrigPolyForm::dx(n, 0).wedge(&TrigPolyForm::dx(n, 1))?.scale_real(0.7);
    let mut mu = MixedForm::one(n, 1);
    mu.set_component(omega.add(&beta.ext_d())?)?;
    let z = mu.wedge(cs)?.component(n).integrate_top_scalar()?;
    Ok(z.re + z.im)
}

pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> Result<Failures, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    let mut worst = |name: &str, defect: f64, tol: f64| match rows.iter_mut().find(|r| r.0 == name) {
        Some(r) => r.1 = r.1.max(defect),
        None => rows.push((name.into(), defect, tol)),
    };

    for trial in 0..TRIALS {
        let (p, q) = (trial % 4, (trial / 4) % 3);
        let a = random_form(5, p, 2, 4, 2, &mut rng);
        let b = random_form(5, q, 2, 4, 2, &mut rng);
        let scale = (TAU * 3.0).powi(2) * a.max_coefficient().max(1e-300);
        worst("d² = 0", a.ext_d().ext_d().max_coefficient() / scale, 1e-15);
        let lhs = a.wedge(&b)?.ext_d();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.ext_d().wedge(&b)?.add(&a.wedge(&b.ext_d())?.scale_real(sign))?;
        worst("Leibniz", lhs.sub(&rhs)?.max_coefficient() / lhs.max_coefficient().max(1.0), 1e-13);
        let sa = random_form(5, p, 1, 4, 2, &mut rng);
        let sb = random_form(5, q, 1, 4, 2, &mut rng);
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        worst("graded commutativity", sa.wedge(&sb)?.sub(&sb.wedge(&sa)?.scale_real(sign))?.max_coefficient(), 1e-13);
        let st = random_form(3, 2, 1, 5, 2, &mut rng);
        worst("Stokes", st.ext_d().integrate_top_scalar()?.norm(), 0.0);
    }

    for fiber in [1usize, 2] {
        let conn = |hol: Vec<f64>, rng: &mut ChaCha8Rng| Connection::new(hol, random_skew(3, fiber, rng));
        let a0 = conn(vec![0.3, -0.2, 0.5], &mut rng)?;
        let mid = conn(vec![1.1, 0.4, -0.3], &mut rng)?;
        let a1 = conn(vec![-0.6, 0.9, 0.2], &mut rng)?;
        let pair_seed: u64 = rng.gen();
        let straight = pair_with_closed(&chs(&a0, &a1)?, &mut ChaCha8Rng::seed_from_u64(pair_seed))?;
        let detour = pair_with_closed(&chs_path(&[a0, mid, a1])?, &mut ChaCha8Rng::seed_from_u64(pair_seed))?;
        worst("chs path independence", (straight - detour).abs() / straight.abs().max(1.0), 1e-10);
    }

    let flat_ahat = ahat_form(&CurvatureInput::flat(5))? == MixedForm::one(5, 1);
    worst("Â of flat curvature is 1", if flat_ahat { 0.0 } else { 1.0 }, 0.0);

    let flat = CurvatureInput::flat(3);
    let a0 = Connection::new(cfg.hol.clone(), random_skew(3, 1, &mut rng))?;
    let a1 = Connection::new(vec![-0.2, 0.5, 0.7], random_skew(3, 1, &mut rng))?;
    let fwd = prediction(&a0, &a1, &flat)?.value;
    let back = prediction(&a1, &a0, &flat)?.value;
    worst("prediction antisymmetry", (fwd + back).abs() / fwd.abs().max(1.0), 1e-10);

    let base = Connection::flat(vec![0.31, -0.17, 0.05])?;
    for r in [1.0, 4.0, 16.0] {
        let end = Connection::new(base.holonomy().to_vec(), spin_c_increment(&contact_form(), r))?;
        let pred = prediction(&base, &end, &flat)?.value;
        let lead = leading_order(&contact_form(), r)?.value;
        worst("contact prediction equals leading order", (pred - lead).abs() / lead.abs(), 1e-12);
    }

    let failures: Failures =
        rows.iter().filter(|r| r.1 > r.2).map(|r| format!("{}: defect {:.3e} above {:.1e}", r.0, r.1, r.2)).collect();
    let table: Vec<Vec<String>> =
        rows.iter().map(|r| vec![r.0.clone(), num(r.1), num(r.2), (r.1 <= r.2).to_string()]).collect();
    out.write_csv("checks.csv", &format!("chs-check seed={} trials={TRIALS}", cfg.seed), &["check", "defect", "tolerance", "pass"], &table)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "experiment": "chs-check",
            "seed": cfg.seed,
            "checks": rows.iter().map(|r| serde_json::json!({ "check": r.0, "defect": r.1, "tolerance": r.2 })).collect::<Vec<_>>(),
            "failures": failures,
        }),
    )?;
    Ok(failures)
}
