//! The heat-mollified estimator `∫_0^1 ℘(s) ds` of the spectral flow.

use alloc::string::String;
use alloc::vec::Vec;

use super::mollifier::phi;
use super::path::PathSpec;
use crate::dirac::{cl_pairings, eig_block, BlockLayout};
use crate::math::{exp, ln, powf, sqrt, E};
use crate::{par, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorParams {
    pub t: f64,
    /// `R >= 1`.
    pub r: f64,
    pub q: f64,
    /// `T = Φ(R t^{-1/2})`.
    pub big_t: f64,
    /// Eigenvalue truncation `R t^{-1/2}`.
    pub window: f64,
    /// The curvature scale the parameters were chosen for, if any.
    pub rmax: Option<f64>,
    pub clamped: bool,
    pub warnings: Vec<String>,
}

impl EstimatorParams {
    pub fn new(t: f64, r: f64, q: f64) -> Result<Self> {
        if !(t > 0.0) || !(r >= 1.0) || !(q > 0.0) {
            return Err(Error::InvalidInput(alloc::format!("estimator parameters need t > 0, R >= 1, q > 0 (t = {t}, R = {r}, q = {q})")));
        }
        let window = r / sqrt(t);
        Ok(Self { t, r, q, big_t: phi(window, t), window, rmax: None, clamped: false, warnings: Vec::new() })
    }

    /// Shrinks `R` so that the truncation fits in `trusted`. If that would push
    /// `R` below 1, `t` is raised to `1/trusted²` and `R = 1` instead.
    pub fn clamp_to(mut self, trusted: f64) -> Self {
        if self.window <= trusted {
            return self;
        }
        let r = trusted * sqrt(self.t);
        if r >= 1.0 {
            self.warnings.push(alloc::format!("R clamped from {} to {} to fit the trusted window {}", self.r, r, trusted));
            self.r = r;
        } else {
            let t = 1.0 / (trusted * trusted);
            self.warnings.push(alloc::format!(
                "t raised from {} to {} and R set to 1 to fit the trusted window {}",
                self.t,
                t,
                trusted
            ));
            self.t = t;
            self.r = 1.0;
        }
        // Rounding in `R/√t` must not step past the window just fitted.
        self.window = (self.r / sqrt(self.t)).min(trusted);
        self.big_t = phi(self.window, self.t);
        self.clamped = true;
        self
    }

    /// `r·t`, which should stay at most 1.
    pub fn rt(&self) -> Option<f64> {
        self.rmax.map(|r| r * self.t)
    }
}

/// `t = r^{-(1+q)}`, `R = ln r` with `q = 1/(2(n+1))`. Below `r = e` this
/// falls back to `t = 1/(2r)`, `R = 1`.
pub fn choose_params(rmax: f64, n: usize) -> Result<EstimatorParams> {
    if !(rmax > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("curvature scale must be positive, got {rmax}")));
    }
    let q = 1.0 / (2.0 * (n as f64 + 1.0));
    let mut p = if rmax >= E {
        EstimatorParams::new(powf(rmax, -(1.0 + q)), ln(rmax).max(1.0), q)?
    } else {
        let mut p = EstimatorParams::new(1.0 / (2.0 * rmax), 1.0, q)?;
        p.warnings.push(alloc::format!("r = {rmax} < e: using t = 1/(2r), R = 1"));
        p
    };
    p.rmax = Some(rmax);
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WpSample {
    pub s: f64,
    /// Smallest `|λ|` among the tracked blocks.
    pub lambda_min_abs: f64,
    pub wp: f64,
    /// Eigenvalues with `|λ| <= R t^{-1/2}`.
    pub n_s: usize,
}

#[derive(Clone, Debug)]
pub struct EstimatorResult {
    pub value: f64,
    /// `max_s n_s`.
    pub n: usize,
    pub samples: Vec<WpSample>,
    pub params: EstimatorParams,
}

/// `℘(s)` with eigenvalues truncated at `window` rather than `params.window`.
pub fn wp_with_window(path: &PathSpec, layout: &BlockLayout, s: f64, params: &EstimatorParams, window: f64) -> Result<WpSample> {
    if window > layout.trusted_window() {
        return Err(Error::WindowExceedsTrusted { requested: window, trusted: layout.trusted_window() });
    }
    let conn = path.at(s)?;
    let hol = conn.holonomy();
    let labels = layout.labels_within(hol, hol, conn.oscillatory().coefficient_l1(), window);
    let per_block = par::map(&labels, |label| -> Result<(Vec<(f64, f64)>, f64)> {
        let m = layout.assemble(&conn, label)?;
        let e = eig_block(layout, label, &m)?;
        let min_abs = e.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let inside: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i].abs() <= window).collect();
        let pairings = cl_pairings(&e.vectors, &inside, path.velocity(), layout, label)?;
        Ok((inside.iter().map(|&i| e.values[i]).zip(pairings).collect(), min_abs))
    });
    let mut terms = Vec::new();
    let mut lambda_min_abs = f64::INFINITY;
    for b in per_block {
        let (t, m) = b?;
        terms.extend(t);
        lambda_min_abs = lambda_min_abs.min(m);
    }
    terms.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)).then(a.1.total_cmp(&b.1)));
    let sum: f64 = terms.iter().map(|(lam, p)| p * exp(-lam * lam * params.t)).sum();
    Ok(WpSample { s, lambda_min_abs, wp: sum / (2.0 * params.big_t), n_s: terms.len() })
}

pub fn wp(path: &PathSpec, layout: &BlockLayout, s: f64, params: &EstimatorParams) -> Result<WpSample> {
    wp_with_window(path, layout, s, params, params.window)
}

/// `∫_0^1 ℘(s) ds` by composite Simpson on the path grid.
pub fn estimator_flow(path: &PathSpec, params: &EstimatorParams) -> Result<EstimatorResult> {
    let layout = path.layout()?;
    if params.window > layout.trusted_window() {
        return Err(Error::WindowExceedsTrusted { requested: params.window, trusted: layout.trusted_window() });
    }
    let samples = path.grid().iter().map(|&s| wp(path, &layout, s, params)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = samples.iter().map(|w| w.s).collect();
    let ys: Vec<f64> = samples.iter().map(|w| w.wp).collect();
    let n = samples.iter().map(|w| w.n_s).max().unwrap_or(0);
    Ok(EstimatorResult { value: simpson(&xs, &ys), n, samples, params: params.clone() })
}

/// Composite Simpson on a possibly non-uniform grid. Pairs of intervals use
/// the three-point rule; an odd trailing interval integrates the quadratic
/// through the last three points over that interval alone.
pub fn simpson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let m = xs.len();
    if m < 2 {
        return 0.0;
    }
    if m == 2 {
        return 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < m {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        let h = h0 + h1;
        total += h / 6.0
            * ((2.0 - h1 / h0) * ys[i] + h * h / (h0 * h1) * ys[i + 1] + (2.0 - h0 / h1) * ys[i + 2]);
        i += 2;
    }
    if i + 1 < m {
        // Last interval [x_{m-2}, x_{m-1}] from the quadratic through the last three points.
        let h0 = xs[m - 2] - xs[m - 3];
        let h1 = xs[m - 1] - xs[m - 2];
        total += h1 / 6.0
            * (-(h1 * h1) / (h0 * (h0 + h1)) * ys[m - 3]
                + (3.0 + h1 / h0) * ys[m - 2]
                + (2.0 * h1 + 3.0 * h0) / (h0 + h1) * ys[m - 1]);
    }
    total
}
