//! Check of `D² = ∇†∇ + cl(F_{A_F})` (flat metric) on random
//! trigonometric-polynomial spinor fields, computed exactly in Fourier space.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::clifford::CliffordRep;
use crate::connection::Connection;
use crate::linalg::CMat;
use crate::math::{sqrt, TAU};
use crate::{Error, Result, C64};

type Field = BTreeMap<Vec<i32>, Vec<C64>>;

/// `max ‖D²ψ − (∇†∇ψ + cl(F)ψ)‖ / ‖ψ‖` over `trials` random fields supported
/// in `|k_j| <= K/2`, with the standard Clifford representation on both
/// sides.
pub fn weitzenbock_residual(conn: &Connection, cutoff: usize, trials: usize, seed: u64) -> Result<f64> {
    let rep = CliffordRep::standard(conn.dim())?;
    weitzenbock_residual_with(conn, cutoff, trials, seed, &rep, &rep)
}

/// As [`weitzenbock_residual`], with `operator` used to build `D` and
/// `reference` used for `cl(F)`. Passing a representation with one gamma
/// flipped as `operator` is the negative control.
pub fn weitzenbock_residual_with(
    conn: &Connection,
    cutoff: usize,
    trials: usize,
    seed: u64,
    operator: &CliffordRep,
    reference: &CliffordRep,
) -> Result<f64> {
    let n = conn.dim();
    if operator.dim() != n || reference.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: operator.dim() });
    }
    let cell = operator.spin_dim() * conn.fiber();
    let half = (cutoff / 2).max(1) as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curvature = conn.curvature();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = random_field(n, half, cell, &mut rng);
        let dpsi = apply_dirac(&psi, conn, operator);
        let d2 = apply_dirac(&dpsi, conn, operator);
        let mut rhs: Field = BTreeMap::new();
        for j in 0..n {
            let nj = apply_covariant(&psi, conn, j, operator.spin_dim());
            let njj = apply_covariant(&nj, conn, j, operator.spin_dim());
            axpy(&mut rhs, C64::new(-1.0, 0.0), &njj);
        }
        let cl_f = apply_clifford_two_form(&psi, &curvature, reference);
        axpy(&mut rhs, C64::new(1.0, 0.0), &cl_f);
        axpy(&mut rhs, C64::new(-1.0, 0.0), &d2);
        worst = worst.max(field_norm(&rhs) / field_norm(&psi));
    }
    Ok(worst)
}

fn random_field(n: usize, half: i32, cell: usize, rng: &mut ChaCha8Rng) -> Field {
    let mut out = Field::new();
    let side = (2 * half + 1) as usize;
    for idx in 0..side.pow(n as u32) {
        let mut k = vec![0i32; n];
        let mut rest = idx;
        for kj in k.iter_mut().rev() {
            *kj = (rest % side) as i32 - half;
            rest /= side;
        }
        let v = (0..cell).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        out.insert(k, v);
    }
    out
}

fn axpy(acc: &mut Field, z: C64, x: &Field) {
    for (k, v) in x {
        let slot = acc.entry(k.clone()).or_insert_with(|| vec![C64::new(0.0, 0.0); v.len()]);
        for (a, b) in slot.iter_mut().zip(v) {
            *a += z * b;
        }
    }
}

fn field_norm(f: &Field) -> f64 {
    sqrt(f.values().flat_map(|v| v.iter().map(|z| z.norm_sqr())).sum())
}

/// `(spin ⊗ fiber)` matrix acting on a cell vector.
fn apply_cell(m: &CMat, v: &[C64]) -> Vec<C64> {
    m.mul_vec(v)
}

/// `∇_j ψ = (∂_j + A_j)ψ`, with `A_j` acting on the bundle fiber only.
fn apply_covariant(psi: &Field, conn: &Connection, j: usize, spin: usize) -> Field {
    let id_spin = CMat::identity(spin);
    let mut out = Field::new();
    for (k, v) in psi {
        let phase = C64::new(0.0, TAU * k[j] as f64 + conn.holonomy()[j]);
        let w: Vec<C64> = v.iter().map(|z| z * phase).collect();
        add_at(&mut out, k.clone(), &w);
    }
    for (q, idx, coeff) in conn.oscillatory().terms() {
        if idx.indices().next() != Some(j) {
            continue;
        }
        let m = id_spin.kron(coeff);
        for (k, v) in psi {
            let target: Vec<i32> = k.iter().zip(&q.0).map(|(a, b)| a + b).collect();
            add_at(&mut out, target, &apply_cell(&m, v));
        }
    }
    out
}

/// `Σ_j c_j ∇_j ψ`.
fn apply_dirac(psi: &Field, conn: &Connection, rep: &CliffordRep) -> Field {
    let id_fiber = CMat::identity(conn.fiber());
    let mut out = Field::new();
    for j in 0..conn.dim() {
        let nj = apply_covariant(psi, conn, j, rep.spin_dim());
        let cj = rep.gamma(j).kron(&id_fiber);
        for (k, v) in &nj {
            add_at(&mut out, k.clone(), &apply_cell(&cj, v));
        }
    }
    out
}

/// `Σ_{i<j} c_i c_j F_ij ψ`.
fn apply_clifford_two_form(psi: &Field, f: &crate::forms::TrigPolyForm, rep: &CliffordRep) -> Field {
    let mut out = Field::new();
    for (q, idx, coeff) in f.terms() {
        let mut it = idx.indices();
        let (i, j) = (it.next().expect("2-form"), it.next().expect("2-form"));
        let m = rep.gamma(i).matmul(rep.gamma(j)).kron(coeff);
        for (k, v) in psi {
            let target: Vec<i32> = k.iter().zip(&q.0).map(|(a, b)| a + b).collect();
            add_at(&mut out, target, &apply_cell(&m, v));
        }
    }
    out
}

fn add_at(out: &mut Field, k: Vec<i32>, v: &[C64]) {
    let slot = out.entry(k).or_insert_with(|| vec![C64::new(0.0, 0.0); v.len()]);
    for (a, b) in slot.iter_mut().zip(v) {
        *a += b;
    }
}
