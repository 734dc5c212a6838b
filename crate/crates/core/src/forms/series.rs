use alloc::format;

use super::form::TrigPolyForm;
use super::mixed::MixedForm;
use crate::math::factorial;
use crate::{Error, Result};

const ANTISYM_TOL: f64 = 1e-12;

/// `Σ_j F^j / j!` for an even-degree form of degree at least 2. The series
/// stops once the powers pass degree `n`.
pub fn exp_form(f: &TrigPolyForm) -> Result<MixedForm> {
    if f.degree() < 2 || f.degree() % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "exp_form needs an even degree >= 2, got {}",
            f.degree()
        )));
    }
    MixedForm::from_form(f).exp_nilpotent()
}

/// A curvature-type 2-form whose fiber values are real antisymmetric `d×d`
/// matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureInput {
    r2: TrigPolyForm,
}

impl CurvatureInput {
    pub fn new(r2: TrigPolyForm) -> Result<Self> {
        if r2.degree() != 2 || r2.vanishes_above_top() {
            return Err(Error::DegreeMismatch { expected: 2, found: r2.degree() });
        }
        let scale = r2.max_coefficient().max(1.0);
        for (k, idx, c) in r2.terms() {
            let defect = c.transpose().add(c).max_abs();
            if defect > ANTISYM_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "curvature coefficient at k = {k}, I = {:?} is not antisymmetric (defect {defect:.3e})",
                    idx.indices().collect::<alloc::vec::Vec<_>>()
                )));
            }
        }
        let real = r2.real_defect();
        if real > ANTISYM_TOL * scale {
            return Err(Error::InvalidInput(format!("curvature form is not real (defect {real:.3e})")));
        }
        Ok(Self { r2 })
    }

    /// The flat case `ℛ = 0` on `T^n` (`d = 1`).
    pub fn flat(n: usize) -> Self {
        Self { r2: TrigPolyForm::zero(n, 2.min(n), 1) }
    }

    pub fn form(&self) -> &TrigPolyForm {
        &self.r2
    }

    pub fn dim(&self) -> usize {
        self.r2.dim()
    }
}

/// `Ω_Â = j^{-1/2}` with `j = det(sinh(ℛ/2) / (ℛ/2))`.
///
/// Even-degree forms commute, so the matrix-of-forms series behave like
/// ordinary matrix power series: `S = Σ X^{2j}/(2j+1)!` with `X = ℛ/2`,
/// `j = exp(tr log S)`, then the binomial series for `(1 + u)^{-1/2}`.
pub fn ahat_form(r: &CurvatureInput) -> Result<MixedForm> {
    let n = r.dim();
    let form = r.form();
    if form.is_zero() {
        return Ok(MixedForm::one(n, 1));
    }
    let x = MixedForm::from_form(&form.scale_real(0.5));
    let x2 = x.wedge(&x)?;
    // S - 1 = Σ_{j>=1} (X²)^j / (2j+1)!
    let s_minus_one = x2.power_series(|j| if j == 0 { 0.0 } else { 1.0 / factorial(2 * j + 1) })?;
    let log_s = s_minus_one.power_series(|j| match j {
        0 => 0.0,
        _ if j % 2 == 1 => 1.0 / j as f64,
        _ => -1.0 / j as f64,
    })?;
    let j_form = log_s.trace_fiber().exp_nilpotent()?;
    let mut u = j_form;
    let mut zero_part = u.component(0).clone();
    zero_part = zero_part.sub(&TrigPolyForm::one(n, 1))?;
    u.set_component(zero_part)?;
    u.power_series(binomial_minus_half)
}

/// Coefficients of `(1 + u)^{-1/2} = Σ_j binom(-1/2, j) u^j`.
fn binomial_minus_half(j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (-0.5 - i as f64) / (i as f64 + 1.0))
}
