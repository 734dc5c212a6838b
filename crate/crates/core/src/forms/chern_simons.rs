use alloc::format;

use super::form::TrigPolyForm;
use super::mixed::MixedForm;
use super::quadrature::gauss_legendre_unit;
use super::series::{ahat_form, CurvatureInput};
use crate::connection::Connection;
use crate::math::{factorial, PI};
use crate::{Error, Result, C64};

/// Allowed imaginary part of a real-valued integral, relative to
/// `max(|value|, 1)`.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// `∫_0^1 tr(â ∧ exp F_{A(s)}) ds` for the straight line `A(s) = A0 + s â`,
/// `â = A1 - A0`. Both connections are the ones entering the Dirac operator.
pub fn chs(a0: &Connection, a1: &Connection) -> Result<MixedForm> {
    if a0.dim() != a1.dim() {
        return Err(Error::DimensionMismatch { expected: a0.dim(), found: a1.dim() });
    }
    if a0.fiber() != a1.fiber() {
        return Err(Error::FiberMismatch { expected: a0.fiber(), found: a1.fiber() });
    }
    chs_forms(&a0.potential(), &a1.potential())
}

/// [`chs`] on raw potentials.
pub fn chs_forms(p0: &TrigPolyForm, p1: &TrigPolyForm) -> Result<MixedForm> {
    let n = p0.dim();
    let k = p0.fiber();
    let a_hat = p1.sub(p0)?;
    if a_hat.is_zero() {
        return Ok(MixedForm::zero(n, 1));
    }
    // F(s) = F0 + s d_{A0}â + s² â∧â; the integrand has s-degree at most
    // n-1 (abelian) or n+1 (matrix fiber).
    let max_deg = if k == 1 { n.saturating_sub(1) } else { n + 1 };
    let nodes = (max_deg + 2).div_ceil(2);
    let a_hat_mixed = MixedForm::from_form(&a_hat);
    let mut out = MixedForm::zero(n, 1);
    for (s, w) in gauss_legendre_unit(nodes) {
        let a_s = p0.add(&a_hat.scale_real(s))?;
        let f_s = a_s.ext_d().add(&a_s.wedge(&a_s)?)?;
        let exp_f = if n >= 2 { super::series::exp_form(&f_s)? } else { MixedForm::one(n, k) };
        let integrand = a_hat_mixed.wedge(&exp_f)?.trace_fiber();
        out = out.add(&integrand.scale_real(w))?;
    }
    Ok(out)
}

/// `chs` along the piecewise-linear path through `points`; sums the segment
/// forms.
pub fn chs_path(points: &[Connection]) -> Result<MixedForm> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("path needs at least one connection".into()))?;
    let mut out = MixedForm::zero(first.dim(), 1);
    for pair in points.windows(2) {
        out = out.add(&chs(&pair[0], &pair[1])?)?;
    }
    Ok(out)
}

/// A real number obtained from a complex integral, with the discarded
/// imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealValue {
    pub value: f64,
    pub imag_residue: f64,
}

impl RealValue {
    fn from_complex(what: &'static str, z: C64) -> Result<Self> {
        let residue = z.im.abs();
        if residue > IMAG_RESIDUE_TOL * z.norm().max(1.0) {
            return Err(Error::ImaginaryResidue { what, value: z.re, residue });
        }
        Ok(Self { value: z.re, imag_residue: residue })
    }
}

/// `(1/2πi)^{(n+1)/2} ∫ Ω_Â ∧ chs(A0, A1)` using the degree-`n` component.
pub fn prediction(a0: &Connection, a1: &Connection, r2: &CurvatureInput) -> Result<RealValue> {
    prediction_from_chs(&chs(a0, a1)?, r2)
}

/// [`prediction`] for an already computed `chs` form.
pub fn prediction_from_chs(cs: &MixedForm, r2: &CurvatureInput) -> Result<RealValue> {
    let n = cs.dim();
    if r2.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r2.dim() });
    }
    let ahat = ahat_form(r2)?;
    let top = ahat.wedge(cs)?.component(n).integrate_top_scalar()?;
    let m = (n + 1) / 2;
    let factor = two_pi_i_inverse_power(m, 2.0);
    RealValue::from_complex("prediction", factor * top)
}

/// `r^m (1/4πi)^m / m! ∫ a ∧ (da)^{m-1}` with `m = (n+1)/2`, for an
/// imaginary-valued 1-form `a`.
pub fn leading_order(a: &TrigPolyForm, r: f64) -> Result<RealValue> {
    if a.fiber() != 1 {
        return Err(Error::FiberMismatch { expected: 1, found: a.fiber() });
    }
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: a.degree() });
    }
    let defect = a.anti_hermitian_defect();
    if defect > 1e-12 * a.max_coefficient().max(1.0) {
        return Err(Error::InvalidInput(format!("leading_order needs an imaginary 1-form (defect {defect:.3e})")));
    }
    let n = a.dim();
    let m = (n + 1) / 2;
    let da = a.ext_d();
    let mut acc = a.clone();
    for _ in 1..m {
        acc = acc.wedge(&da)?;
    }
    let integral = acc.integrate_top_scalar()?;
    let factor = two_pi_i_inverse_power(m, 4.0) * crate::math::powi(r, m as i32) / factorial(m);
    RealValue::from_complex("leading_order", factor * integral)
}

/// `(1/(c π i))^m`.
fn two_pi_i_inverse_power(m: usize, c: f64) -> C64 {
    let base = C64::new(0.0, -1.0 / (c * PI));
    (0..m).fold(C64::new(1.0, 0.0), |acc, _| acc * base)
}
