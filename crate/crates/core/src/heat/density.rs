use alloc::vec::Vec;

use super::trace::heat_window;
use crate::connection::Connection;
use crate::dirac::{cl_pairings, r_of_a, EigenSystem};
use crate::forms::{ahat_form, exp_form, CurvatureInput, MixedForm, TrigPolyForm};
use crate::math::{exp, sqrt, PI};
use crate::{par, Error, Result, C64};

/// `π^{1/2} t^{-1/2} (1/2πi)^{(n+1)/2}`.
pub fn density_prefactor(n: usize, t: f64) -> C64 {
    let base = C64::new(0.0, -1.0 / (2.0 * PI));
    let phase = (0..(n + 1) / 2).fold(C64::new(1.0, 0.0), |acc, _| acc * base);
    phase * (sqrt(PI) / sqrt(t))
}

/// Degree-`n` part of `Ω_Â ∧ tr(â ∧ e^{F})` on the flat torus (`Ω_Â = 1`),
/// with `F` the curvature of `A_F`.
pub fn density_form(conn: &Connection, ahat: &TrigPolyForm) -> Result<TrigPolyForm> {
    let n = conn.dim();
    if ahat.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: ahat.dim() });
    }
    let ch = if n >= 2 { exp_form(&conn.curvature())? } else { MixedForm::one(n, conn.fiber()) };
    let omega = ahat_form(&CurvatureInput::flat(n))?;
    let inner = MixedForm::from_form(ahat).wedge(&ch)?.trace_fiber();
    Ok(omega.wedge(&inner)?.component(n).clone())
}

/// Grid for `r(A)` that resolves the curvature's Fourier support.
pub fn curvature_grid(conn: &Connection) -> usize {
    let radius = conn.oscillatory().support_radius().into_iter().max().unwrap_or(0).max(1) as usize;
    (8 * radius).max(8)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PLambda {
    /// `Σ_{|λ_ζ| <= λ} ⟨ζ, cl(â) ζ⟩ e^{-λ_ζ² t}`.
    pub p: f64,
    /// The form-side density it approximates.
    pub density: f64,
    pub residual: f64,
    pub r: f64,
}

/// Truncated weighted trace and its predicted density. Requires `r·t <= 1`.
pub fn p_lambda(conn: &Connection, eig: &EigenSystem, ahat: &TrigPolyForm, t: f64, lambda: f64) -> Result<PLambda> {
    let window = heat_window(eig);
    if lambda > window {
        return Err(Error::WindowExceedsTrusted { requested: lambda, trusted: window });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("heat time must be positive, got {t}")));
    }
    let r = r_of_a(conn, curvature_grid(conn))?;
    if r * t > 1.0 {
        return Err(Error::Precondition(alloc::format!("r·t = {} exceeds 1 (r = {r}, t = {t})", r * t)));
    }
    let layout = &eig.layout;
    let per_block = par::map(&eig.blocks, |b| -> Result<Vec<(f64, f64)>> {
        let inside: Vec<usize> = (0..b.values.len()).filter(|&i| b.values[i].abs() <= lambda).collect();
        let pair = cl_pairings(&b.vectors, &inside, ahat, layout, &b.label)?;
        Ok(inside.iter().map(|&i| b.values[i]).zip(pair).collect())
    });
    let mut terms = Vec::new();
    for b in per_block {
        terms.extend(b?);
    }
    terms.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)));
    let p: f64 = terms.iter().map(|(l, q)| q * exp(-l * l * t)).sum();
    let n = conn.dim();
    let integral = density_form(conn, ahat)?.integrate_top_scalar()?;
    let z = density_prefactor(n, t) * integral;
    if z.im.abs() > 1e-9 * z.norm().max(1.0) {
        return Err(Error::ImaginaryResidue { what: "weighted trace density", value: z.re, residue: z.im.abs() });
    }
    Ok(PLambda { p, density: z.re, residual: p - z.re, r })
}
