//! Unitary connections on the spinor bundle of the flat torus.
//!
//! A [`Connection`] stores `A_F`, the connection that actually enters the
//! Dirac operator `D = Σ_j cl(dx_j)(∂_j + A_j)`. It splits into a constant
//! holonomy part `i θ_j dx_j` (scalar, `θ ∈ R^n`) and a zero-mean oscillatory
//! `u(k)`-valued 1-form.
//!
//! For the `Spin_c` case the connection `A` on the determinant-type bundle
//! `P` relates to `A_F` by halving: `A_F = A / 2`, so `F_A = 2 F_{A_F}`.
//! [`spin_c_increment`] converts a `P`-side increment `r·a` into the
//! `A_F`-side increment.

use alloc::format;
use alloc::vec::Vec;

use crate::forms::{IndexSet, Momentum, TrigPolyForm};
use crate::linalg::CMat;
use crate::math::TAU;
use crate::{Error, Result, C64};

/// Anti-hermiticity tolerance for stored potentials.
const SKEW_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    hol: Vec<f64>,
    osc: TrigPolyForm,
}

impl Connection {
    /// Validates: `n` odd, `osc` a degree-1 `u(k)`-valued form without a
    /// zero-momentum term.
    pub fn new(hol: Vec<f64>, osc: TrigPolyForm) -> Result<Self> {
        let n = hol.len();
        if n % 2 == 0 {
            return Err(Error::InvalidInput(format!("torus dimension must be odd, got {n}")));
        }
        if osc.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: osc.dim() });
        }
        if osc.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: osc.degree() });
        }
        if osc.terms().any(|(k, _, _)| k.is_zero()) {
            return Err(Error::InvalidInput(
                "oscillatory part has a zero-momentum term; constant parts belong in the holonomy".into(),
            ));
        }
        let defect = osc.anti_hermitian_defect();
        if defect > SKEW_TOL * osc.max_coefficient().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "oscillatory part is not u(k)-valued (defect {defect:.3e})"
            )));
        }
        Ok(Self { hol, osc })
    }

    /// Flat scalar connection `i θ·dx`.
    pub fn flat(hol: Vec<f64>) -> Result<Self> {
        let n = hol.len();
        Self::new(hol, TrigPolyForm::zero(n, 1, 1))
    }

    pub fn dim(&self) -> usize {
        self.hol.len()
    }

    pub fn fiber(&self) -> usize {
        self.osc.fiber()
    }

    pub fn holonomy(&self) -> &[f64] {
        &self.hol
    }

    pub fn oscillatory(&self) -> &TrigPolyForm {
        &self.osc
    }

    /// `A_F = Σ_j i θ_j dx_j ⊗ 1 + osc` as a single form.
    pub fn potential(&self) -> TrigPolyForm {
        let n = self.dim();
        let k = self.fiber();
        let mut a = self.osc.clone();
        for (j, &theta) in self.hol.iter().enumerate() {
            if theta != 0.0 {
                let c = CMat::identity(k).scale(C64::new(0.0, theta));
                a.insert(Momentum::zero(n), IndexSet::single(j), c).expect("shape matches");
            }
        }
        a
    }

    /// `F_{A_F} = dA + A ∧ A`.
    pub fn curvature(&self) -> TrigPolyForm {
        let a = self.potential();
        let da = a.ext_d();
        let aa = a.wedge(&a).expect("same shape");
        da.add(&aa).expect("same shape")
    }

    /// Gauge transform by `g = e^{2πi m·x}`: `A_F ↦ A_F + g^{-1} dg`.
    pub fn gauge_shift(&self, m: &[i32]) -> Result<Self> {
        if m.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.len() });
        }
        let hol = self.hol.iter().zip(m).map(|(t, &mj)| t + TAU * mj as f64).collect();
        Ok(Self { hol, osc: self.osc.clone() })
    }

    /// `A + s·v` for a `u(k)`-valued 1-form `v` whose constant part is central.
    pub fn shifted(&self, velocity: &TrigPolyForm, s: f64) -> Result<Self> {
        let (dhol, dosc) = split_velocity(velocity, self.dim(), self.fiber())?;
        let hol = self.hol.iter().zip(&dhol).map(|(t, d)| t + s * d).collect();
        let osc = self.osc.add(&dosc.scale_real(s))?;
        Ok(Self { hol, osc })
    }

    /// `other.A_F - self.A_F`.
    pub fn difference_to(&self, other: &Connection) -> Result<TrigPolyForm> {
        other.potential().sub(&self.potential())
    }
}

/// Splits a velocity 1-form into its constant holonomy rate `θ̇` and its
/// oscillatory part. The constant part must be `i θ̇_j · 1`.
pub fn split_velocity(v: &TrigPolyForm, n: usize, fiber: usize) -> Result<(Vec<f64>, TrigPolyForm)> {
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
    }
    if v.fiber() != fiber {
        return Err(Error::FiberMismatch { expected: fiber, found: v.fiber() });
    }
    if v.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: v.degree() });
    }
    let mut dhol = alloc::vec![0.0; n];
    let zero = Momentum::zero(n);
    for (j, slot) in dhol.iter_mut().enumerate() {
        if let Some(c) = v.coefficient(&zero, IndexSet::single(j)) {
            let theta = c[(0, 0)].im;
            let central = CMat::identity(fiber).scale(C64::new(0.0, theta));
            if c.sub(&central).max_abs() > SKEW_TOL * c.max_abs().max(1.0) {
                return Err(Error::InvalidInput(
                    "constant part of the velocity must be i·θ̇ times the identity".into(),
                ));
            }
            *slot = theta;
        }
    }
    Ok((dhol, v.oscillatory_part()))
}

/// `A_F`-side increment for the `P`-side increment `r·a` of a `Spin_c`
/// connection: `(r/2)·a`.
pub fn spin_c_increment(a: &TrigPolyForm, r: f64) -> TrigPolyForm {
    a.scale_real(0.5 * r)
}

/// The contact-type `u(1)` 1-form `i(cos(2πx₃) dx₁ + sin(2πx₃) dx₂)` on `T^3`,
/// with `∫ a ∧ da = 2π`.
pub fn contact_form() -> TrigPolyForm {
    let mut a = TrigPolyForm::zero(3, 1, 1);
    let up = Momentum(alloc::vec![0, 0, 1]);
    let down = Momentum(alloc::vec![0, 0, -1]);
    let half_i = CMat::scalar(C64::new(0.0, 0.5));
    let half = CMat::scalar(C64::new(0.5, 0.0));
    a.insert(up.clone(), IndexSet::single(0), half_i.clone()).unwrap();
    a.insert(down.clone(), IndexSet::single(0), half_i).unwrap();
    a.insert(up, IndexSet::single(1), half.clone()).unwrap();
    a.insert(down, IndexSet::single(1), half.scale_real(-1.0)).unwrap();
    a
}
