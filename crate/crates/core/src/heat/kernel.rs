use alloc::vec::Vec;

use super::density::{density_prefactor, density_form};
use super::trace::{heat_window, min_admissible_t};
use crate::connection::Connection;
use crate::dirac::EigenSystem;
use crate::forms::{IndexSet, TrigPolyForm};
use crate::linalg::CMat;
use crate::math::{cis, exp, TAU};
use crate::{par, Error, Result, C64};

/// Allowed negative eigenvalue (relative) of a sampled diagonal kernel.
pub const PSD_TOL: f64 = 1e-10;

/// `E(t; x, x) = Σ ζ(x) ζ(x)† e^{-λ²t}` as a matrix on spinor ⊗ fiber.
pub fn diag_kernel(eig: &EigenSystem, t: f64, x: &[f64]) -> Result<CMat> {
    let window = heat_window(eig);
    let min_t = min_admissible_t(window);
    if !(t >= min_t) {
        return Err(Error::TimeTooSmall { t, min_t });
    }
    let layout = &eig.layout;
    if x.len() != layout.dim() {
        return Err(Error::DimensionMismatch { expected: layout.dim(), found: x.len() });
    }
    let cell = layout.cell();
    let parts = par::map(&eig.blocks, |b| {
        let nm = layout.free_momenta();
        let phases: Vec<C64> = (0..nm)
            .map(|m| {
                let k = layout.momentum(&b.label, m);
                cis(TAU * k.iter().zip(x).map(|(kj, xj)| *kj as f64 * xj).sum::<f64>())
            })
            .collect();
        let mut acc = CMat::zeros(cell, cell);
        for (i, &lam) in b.values.iter().enumerate() {
            if lam.abs() > window {
                continue;
            }
            let mut u = alloc::vec![C64::new(0.0, 0.0); cell];
            for (m, ph) in phases.iter().enumerate() {
                for (c, uc) in u.iter_mut().enumerate() {
                    *uc += b.vectors[(m * cell + c, i)] * ph;
                }
            }
            let w = exp(-lam * lam * t);
            for a in 0..cell {
                for c in 0..cell {
                    acc[(a, c)] += u[a] * u[c].conj() * w;
                }
            }
        }
        acc
    });
    let mut total = CMat::zeros(cell, cell);
    for p in parts {
        total = total.add(&p);
    }
    Ok(total)
}

/// `Σ_j c_j ⊗ b_j(x)` on spinor ⊗ fiber.
pub fn clifford_at(eig: &EigenSystem, b: &TrigPolyForm, x: &[f64]) -> Result<CMat> {
    let layout = &eig.layout;
    if b.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: b.degree() });
    }
    let mut out = CMat::zeros(layout.cell(), layout.cell());
    for j in 0..layout.dim() {
        let bj = b.component_at(IndexSet::single(j), x);
        out = out.add(&layout.clifford().gamma(j).kron(&bj));
    }
    Ok(out)
}

/// Both sides of the pointwise density identity at `x`:
/// `tr(cl(â)(x) E(t;x,x))` and `π^{1/2} t^{-1/2} (1/2πi)^{(n+1)/2}` times the
/// `dx_1…dx_n` coefficient of `Ω_Â ∧ tr(â ∧ e^F)` at `x`.
pub fn pointwise_density_check(
    conn: &Connection,
    eig: &EigenSystem,
    ahat: &TrigPolyForm,
    t: f64,
    x: &[f64],
) -> Result<(f64, f64)> {
    let k = diag_kernel(eig, t, x)?;
    let cl = clifford_at(eig, ahat, x)?;
    let lhs = cl.matmul(&k).trace();
    let n = conn.dim();
    let top = density_form(conn, ahat)?.component_at(IndexSet::full(n), x)[(0, 0)];
    let rhs = density_prefactor(n, t) * top;
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    for (what, z) in [("pointwise kernel density", lhs), ("pointwise form density", rhs)] {
        if z.im.abs() > 1e-8 * scale {
            return Err(Error::ImaginaryResidue { what, value: z.re, residue: z.im.abs() });
        }
    }
    Ok((lhs.re, rhs.re))
}

/// Smallest eigenvalue of the hermitian part relative to the largest modulus.
pub fn psd_defect(m: &CMat) -> Result<f64> {
    let h = m.add(&m.adjoint()).scale_real(0.5);
    let e = crate::linalg::hermitian_eigen(&h).map_err(|_| Error::NoConvergence { block: "diag_kernel".into() })?;
    let top = e.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok((-e.values[0] / top).max(0.0))
}
