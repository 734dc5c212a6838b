//! Dense Hermitian eigensolver.
//!
//! Householder reduction to Hermitian tridiagonal form, a diagonal phase
//! change that makes the off-diagonal real and non-negative, then implicit
//! QL with Wilkinson-type shifts. The real Givens rotations of the QL sweep
//! are applied directly to the accumulated complex basis.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::CMat;
use crate::math;
use crate::C64;

const MAX_QL_ITER: usize = 60;

/// Eigenvalues (ascending) and eigenvectors (as columns, same order).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoConvergence;

pub fn hermitian_eigen(a: &CMat) -> Result<HermitianEigen, NoConvergence> {
    assert!(a.is_square(), "hermitian_eigen: matrix must be square");
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    let mut work = a.clone();
    let mut q = CMat::identity(n);
    let (mut diag, mut off) = tridiagonalize(&mut work, &mut q);
    tridiagonal_ql(&mut diag, &mut off, &mut q)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| q[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Reduces `a` in place; returns the real diagonal and the real non-negative
/// sub-diagonal (`off[k]` couples `k` and `k + 1`, `off[n-1] = 0`), with `q`
/// holding the unitary that maps tridiagonal coordinates back.
fn tridiagonalize(a: &mut CMat, q: &mut CMat) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let alpha = math::sqrt((lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>());
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(lo, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] += phase * alpha;
        let vnorm2: f64 = (lo..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // p = tau * A v on the trailing block
        for i in lo..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in lo..n {
                acc += a[(i, j)] * v[j];
            }
            p[i] = acc * tau;
        }
        let vp: C64 = (lo..n).map(|i| v[i].conj() * p[i]).sum();
        let half = 0.5 * tau * vp.re;
        for i in lo..n {
            p[i] -= v[i] * half;
        }
        for i in lo..n {
            for j in lo..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(i, j)] -= upd;
            }
        }
        let beta = -phase * alpha;
        a[(lo, k)] = beta;
        a[(k, lo)] = beta.conj();
        for i in lo + 1..n {
            a[(i, k)] = C64::new(0.0, 0.0);
            a[(k, i)] = C64::new(0.0, 0.0);
        }

        // Q <- Q H
        for r in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in lo..n {
                acc += q[(r, j)] * v[j];
            }
            let acc = acc * tau;
            for j in lo..n {
                let upd = acc * v[j].conj();
                q[(r, j)] -= upd;
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    // Diagonal phase change D with d_{k+1} = d_k e_k/|e_k| makes the
    // off-diagonal |e_k|; fold D into Q.
    let mut d = C64::new(1.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        let e = a[(k + 1, k)];
        let mag = e.norm();
        off[k] = mag;
        d = if mag > 0.0 { d * (e / mag) } else { d };
        for r in 0..n {
            q[(r, k + 1)] *= d;
        }
    }
    (diag, off)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut CMat) -> Result<(), NoConvergence> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    let zi = z[(k, i)];
                    z[(k, i + 1)] = zi * s + f * c;
                    z[(k, i)] = zi * c - f * s;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `max_i |A v_i - λ_i v_i| / max(|A|, tiny)` with `|A|` the spectral radius.
pub fn residual(a: &CMat, eig: &HermitianEigen) -> f64 {
    let n = a.rows();
    let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst: f64 = 0.0;
    for c in 0..n {
        let v = eig.vectors.column(c);
        let av = a.mul_vec(&v);
        let r = math::sqrt(
            av.iter().zip(&v).map(|(x, y)| (x - y * eig.values[c]).norm_sqr()).sum::<f64>(),
        );
        worst = worst.max(r);
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// `max |V†V - I|`.
pub fn orthogonality_defect(vectors: &CMat) -> f64 {
    let g = vectors.adjoint_matmul(vectors);
    let n = g.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}
