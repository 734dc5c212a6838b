use alloc::vec::Vec;

use super::form::TrigPolyForm;
use crate::{Error, Result, C64};

/// Inhomogeneous form `Σ_p ω_p` with one [`TrigPolyForm`] per degree `0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedForm {
    n: usize,
    fiber: usize,
    components: Vec<TrigPolyForm>,
}

impl MixedForm {
    pub fn zero(n: usize, fiber: usize) -> Self {
        Self { n, fiber, components: (0..=n).map(|p| TrigPolyForm::zero(n, p, fiber)).collect() }
    }

    pub fn one(n: usize, fiber: usize) -> Self {
        let mut out = Self::zero(n, fiber);
        out.components[0] = TrigPolyForm::one(n, fiber);
        out
    }

    pub fn from_form(form: &TrigPolyForm) -> Self {
        let mut out = Self::zero(form.dim(), form.fiber());
        if !form.vanishes_above_top() {
            out.components[form.degree()] = form.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn component(&self, degree: usize) -> &TrigPolyForm {
        &self.components[degree]
    }

    pub fn components(&self) -> &[TrigPolyForm] {
        &self.components
    }

    pub fn set_component(&mut self, form: TrigPolyForm) -> Result<()> {
        if form.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: form.dim() });
        }
        if form.fiber() != self.fiber {
            return Err(Error::FiberMismatch { expected: self.fiber, found: form.fiber() });
        }
        if !form.vanishes_above_top() {
            let p = form.degree();
            self.components[p] = form;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TrigPolyForm::is_zero)
    }

    /// Lowest degree carrying a nonzero component.
    pub fn min_degree(&self) -> Option<usize> {
        self.components.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.fiber != other.fiber {
            return Err(Error::FiberMismatch { expected: self.fiber, found: other.fiber });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, fiber: self.fiber, components })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            n: self.n,
            fiber: self.fiber,
            components: self.components.iter().map(|c| c.scale(z)).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Graded product, truncated at degree `n`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n, self.fiber);
        for (p, a) in self.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (q, b) in other.components.iter().enumerate() {
                if b.is_zero() || p + q > self.n {
                    continue;
                }
                let prod = a.wedge(b)?;
                out.components[p + q] = out.components[p + q].add(&prod)?;
            }
        }
        Ok(out)
    }

    pub fn trace_fiber(&self) -> Self {
        Self {
            n: self.n,
            fiber: 1,
            components: self.components.iter().map(TrigPolyForm::trace_fiber).collect(),
        }
    }

    /// `Σ_j N^j / j!` for `N` with vanishing 0-form component, which makes
    /// the series finite (every power raises the degree).
    pub fn exp_nilpotent(&self) -> Result<Self> {
        self.power_series(|j| 1.0 / crate::math::factorial(j))
    }

    /// `Σ_j c_j N^j` for nilpotent `N` (zero 0-form component).
    pub fn power_series(&self, coeff: impl Fn(usize) -> f64) -> Result<Self> {
        if !self.components[0].is_zero() {
            return Err(Error::InvalidInput(
                "power series needs a nilpotent argument (zero 0-form component)".into(),
            ));
        }
        let mut out = Self::one(self.n, self.fiber).scale_real(coeff(0));
        let mut power = Self::one(self.n, self.fiber);
        for j in 1..=self.n {
            power = power.wedge(self)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power.scale_real(coeff(j)))?;
        }
        Ok(out)
    }
}
