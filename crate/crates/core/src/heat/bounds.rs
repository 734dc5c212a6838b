use alloc::vec::Vec;

use crate::math::{exp, ln, powf, PI};
use crate::{Error, Result};

/// Sample times and points for heat sweeps.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatProbe {
    pub t_grid: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl HeatProbe {
    pub fn new(t_min: f64, t_max: f64, count: usize, per_axis: usize, n: usize) -> Result<Self> {
        Ok(Self { t_grid: log_spaced(t_min, t_max, count)?, points: uniform_points(n, per_axis) })
    }
}

/// `count` points from `lo` to `hi`, evenly spaced in `ln`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || count == 0 {
        return Err(Error::InvalidInput(alloc::format!("bad log grid [{lo}, {hi}] x {count}")));
    }
    if count == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (ln(lo), ln(hi));
    Ok((0..count).map(|i| exp(a + (b - a) * i as f64 / (count - 1) as f64)).collect())
}

/// The `per_axis^n` points `j/per_axis` of the unit torus.
pub fn uniform_points(n: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = alloc::vec![0.0; n];
            for xj in x.iter_mut().rev() {
                *xj = (idx % per_axis) as f64 / per_axis as f64;
                idx /= per_axis;
            }
            x
        })
        .collect()
}

/// Fit of `|E(t;x,x)| <= κ (4πt)^{-n/2} e^{c r t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelBoundFit {
    pub c: f64,
    pub kappa: f64,
}

/// `c` is the least-squares slope of `ln(|E|(4πt)^{n/2})` against `r t`,
/// floored at 0; `κ` is then the largest ratio over the samples.
pub fn fit_kernel_bound(samples: &[(f64, f64)], n: usize, r: f64) -> KernelBoundFit {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, norm)| (r * t, ln(norm * powf(4.0 * PI * t, n as f64 / 2.0))))
        .collect();
    let c = crate::math::least_squares_slope(&pts).unwrap_or(0.0).max(0.0);
    let kappa = samples
        .iter()
        .map(|&(t, norm)| norm / (powf(4.0 * PI * t, -(n as f64) / 2.0) * exp(c * r * t)))
        .fold(0.0, f64::max);
    KernelBoundFit { c, kappa }
}
