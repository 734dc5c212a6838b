use alloc::vec::Vec;

use crate::dirac::EigenSystem;
use crate::math::{exp, ln, powf};
use crate::{Error, Result};

/// Weight allowed for the first eigenvalue outside the window.
pub const TRUNCATION_WEIGHT: f64 = 1e-16;

/// Eigenvalues that heat quantities may use: inside both the assembly
/// window and the trusted window.
pub fn heat_window(eig: &EigenSystem) -> f64 {
    let trusted = eig.layout.trusted_window();
    eig.window.map_or(trusted, |w| w.min(trusted))
}

/// Smallest `t` with `e^{-W²t} <= 1e-16`.
pub fn min_admissible_t(window: f64) -> f64 {
    -ln(TRUNCATION_WEIGHT) / (window * window)
}

fn check_t(window: f64, t: f64) -> Result<()> {
    let min_t = min_admissible_t(window);
    if !(t >= min_t) {
        return Err(Error::TimeTooSmall { t, min_t });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTrace {
    pub value: f64,
    /// `e^{-W²t}`, the weight of the truncation edge.
    pub truncation_weight: f64,
    pub window: f64,
}

/// `Σ e^{-λ²t}` over the windowed eigenvalues, in ascending `|λ|`.
pub fn heat_trace(eig: &EigenSystem, t: f64) -> Result<HeatTrace> {
    let window = heat_window(eig);
    check_t(window, t)?;
    let mut vals: Vec<f64> = eig.values_within(window);
    vals.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let value = vals.iter().map(|l| exp(-l * l * t)).sum();
    Ok(HeatTrace { value, truncation_weight: exp(-window * window * t), window })
}

/// Number of eigenvalues with `|λ| < lambda` (strict).
pub fn count_eigs(eig: &EigenSystem, lambda: f64) -> Result<usize> {
    let window = heat_window(eig);
    if lambda > window {
        return Err(Error::WindowExceedsTrusted { requested: lambda, trusted: window });
    }
    Ok(eig.blocks.iter().flat_map(|b| b.values.iter()).filter(|v| v.abs() < lambda).count())
}

/// One row of the eigenvalue-count sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylSample {
    pub lambda: f64,
    pub count: usize,
    /// `count / (λ + r^{1/2})^n`.
    pub ratio: f64,
}

pub fn weyl_sweep(eig: &EigenSystem, r: f64, lambdas: &[f64]) -> Result<Vec<WeylSample>> {
    let n = eig.layout.dim() as f64;
    lambdas
        .iter()
        .map(|&lambda| {
            let count = count_eigs(eig, lambda)?;
            let ratio = count as f64 / powf(lambda + crate::math::sqrt(r), n);
            Ok(WeylSample { lambda, count, ratio })
        })
        .collect()
}

/// `(4πt)^{-n/2} Σ_{m∈Z^n} e^{-|m|²/4t} cos(m·θ)` times the spinor rank: the
/// free trace on `T^n` with holonomy `θ`, summed on the dual lattice.
pub fn poisson_free_trace(hol: &[f64], t: f64) -> f64 {
    use crate::math::{cos, sqrt, PI};
    let spin = powf(2.0, ((hol.len() - 1) / 2) as f64);
    // Each factor is a one-dimensional theta sum; terms die once m² > 4t·745.
    let mmax = (sqrt(4.0 * t * 745.0) as i64) + 1;
    hol.iter()
        .map(|&theta| {
            let mut s = 1.0;
            for m in 1..=mmax {
                let mf = m as f64;
                s += 2.0 * exp(-mf * mf / (4.0 * t)) * cos(mf * theta);
            }
            s / sqrt(4.0 * PI * t)
        })
        .product::<f64>()
        * spin
}
