use alloc::vec::Vec;

use super::layout::{BlockLabel, BlockLayout};
use crate::forms::TrigPolyForm;
use crate::linalg::{dot, CMat};
use crate::{Error, Result, C64};

/// Allowed imaginary part of `⟨v, cl(b) v⟩`.
pub const PAIRING_IMAG_TOL: f64 = 1e-10;

/// `⟨v, cl(b) v⟩` for a block vector `v` and a `u(k)`-valued 1-form `b`.
/// For the velocity `b = dA_F/ds` this is the eigenvalue derivative `λ'`.
pub fn cl_pairing(v: &[C64], b: &TrigPolyForm, layout: &BlockLayout, label: &BlockLabel) -> Result<f64> {
    if v.len() != layout.block_dim() {
        return Err(Error::DimensionMismatch { expected: layout.block_dim(), found: v.len() });
    }
    let m = layout.clifford_multiplication(b, label)?;
    pair(&m, v, b.coefficient_l1())
}

/// [`cl_pairing`] for several columns of `vectors`, building `cl(b)` once.
pub fn cl_pairings(
    vectors: &CMat,
    columns: &[usize],
    b: &TrigPolyForm,
    layout: &BlockLayout,
    label: &BlockLabel,
) -> Result<Vec<f64>> {
    if vectors.rows() != layout.block_dim() {
        return Err(Error::DimensionMismatch { expected: layout.block_dim(), found: vectors.rows() });
    }
    let m = layout.clifford_multiplication(b, label)?;
    columns.iter().map(|&i| pair(&m, &vectors.column(i), b.coefficient_l1())).collect()
}

fn pair(m: &CMat, v: &[C64], mass: f64) -> Result<f64> {
    let z = dot(v, &m.mul_vec(v));
    let scale = mass.max(1.0) * dot(v, v).re.max(1.0);
    if z.im.abs() > PAIRING_IMAG_TOL * scale {
        return Err(Error::ImaginaryResidue { what: "cl_pairing", value: z.re, residue: z.im.abs() });
    }
    Ok(z.re)
}
