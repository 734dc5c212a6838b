use alloc::vec::Vec;

use crate::math::{cos, PI};

/// Gauss–Legendre nodes and weights on `[0, 1]`; exact for polynomials of
/// degree `<= 2 * points - 1`.
pub fn gauss_legendre_unit(points: usize) -> Vec<(f64, f64)> {
    assert!(points > 0, "gauss_legendre_unit: need at least one node");
    let mut out = Vec::with_capacity(points);
    let n = points as f64;
    for i in 0..points {
        let mut x = cos(PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=points {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
