//! The curvature scale `r(A)`: the smallest `r >= 1` with
//! `Σ_{l=0}^{(n-1)/2} r^{-(1+l/2)} sup|∇^l F_A| <= 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::connection::Connection;
use crate::forms::TrigPolyForm;
use crate::math::{powf, sqrt};
use crate::{Error, Result, C64};

/// Bisection stops once the bracket is below this (relative to `max(1, r)`).
pub const BISECTION_TOL: f64 = 1e-10;

/// `r(A)` for the `Spin_c` connection `A = 2 A_F` behind a rank-one `conn`.
pub fn r_of_a(conn: &Connection, grid: usize) -> Result<f64> {
    if conn.fiber() != 1 {
        return Err(Error::FiberMismatch { expected: 1, found: conn.fiber() });
    }
    let a = conn.potential().scale_real(2.0);
    Ok(curvature_scale(&a, grid)?.r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureScale {
    /// `sup |∇^l F|` for `l = 0..=(n-1)/2`.
    pub sup_norms: Vec<f64>,
    pub r: f64,
}

/// Sup-norms of `F = dA + A∧A` and its covariant derivatives on a uniform
/// `grid^n` lattice, then the scale `r`. Pointwise norms are Euclidean over
/// the components `i < j` (and derivative indices) with Frobenius norm on
/// the fiber.
pub fn curvature_scale(a: &TrigPolyForm, grid: usize) -> Result<CurvatureScale> {
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: a.degree() });
    }
    let n = a.dim();
    let f = a.ext_d().add(&a.wedge(a)?)?;
    let radius = f.support_radius().into_iter().max().unwrap_or(0).max(1) as usize;
    if grid < 4 * radius {
        return Err(Error::InvalidInput(alloc::format!(
            "grid {grid} below 4x the Fourier support radius {radius}"
        )));
    }
    let components: Vec<TrigPolyForm> = (0..n).map(|j| a.component(j)).collect();
    let levels = (n - 1) / 2;
    let mut current = vec![f];
    let mut sup_norms = Vec::with_capacity(levels + 1);
    for l in 0..=levels {
        sup_norms.push(sup_norm(&current, grid, n));
        if l < levels {
            current = current.iter().flat_map(|g| (0..n).map(|j| covariant(g, &components[j], j))).collect();
        }
    }
    let r = solve_curvature_scale(&sup_norms);
    Ok(CurvatureScale { sup_norms, r })
}

/// `∂_j G + [A_j, G]`.
fn covariant(g: &TrigPolyForm, a_j: &TrigPolyForm, j: usize) -> TrigPolyForm {
    let mut out = TrigPolyForm::zero(g.dim(), g.degree(), g.fiber());
    for (k, idx, c) in g.terms() {
        let factor = C64::new(0.0, crate::math::TAU * k.0[j] as f64);
        out.insert(k.clone(), idx, c.scale(factor)).expect("same shape");
    }
    let left = a_j.wedge(g).expect("same shape");
    let right = g.wedge(a_j).expect("same shape");
    out.add(&left).and_then(|x| x.sub(&right)).expect("same shape")
}

fn sup_norm(forms: &[TrigPolyForm], grid: usize, n: usize) -> f64 {
    let total = grid.pow(n as u32);
    let mut x = vec![0.0; n];
    let mut worst: f64 = 0.0;
    for idx in 0..total {
        let mut rest = idx;
        for xj in x.iter_mut().rev() {
            *xj = (rest % grid) as f64 / grid as f64;
            rest /= grid;
        }
        let sq: f64 = forms
            .iter()
            .flat_map(|g| g.evaluate(&x).into_values())
            .map(|m| m.frobenius() * m.frobenius())
            .sum();
        worst = worst.max(sq);
    }
    sqrt(worst)
}

/// Smallest `r >= 1` with `Σ_l r^{-(1+l/2)} M_l <= 1`; the left side is
/// decreasing in `r`, so bisection applies.
pub fn solve_curvature_scale(sup_norms: &[f64]) -> f64 {
    let g = |r: f64| -> f64 {
        sup_norms.iter().enumerate().map(|(l, m)| m * powf(r, -(1.0 + l as f64 / 2.0))).sum()
    };
    if g(1.0) <= 1.0 {
        return 1.0;
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while g(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
