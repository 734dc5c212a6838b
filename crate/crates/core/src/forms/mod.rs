//! Exterior algebra of trigonometric-polynomial forms on the unit torus.
//!
//! Forms are stored exactly as sparse Fourier tables; the only rounding comes
//! from double-precision arithmetic. Products above top degree vanish.

mod chern_simons;
mod form;
mod mixed;
mod quadrature;
mod series;

pub use chern_simons::{
    chs, chs_forms, chs_path, leading_order, prediction, prediction_from_chs, RealValue, IMAG_RESIDUE_TOL,
};
pub use form::{IndexSet, Momentum, TrigPolyForm, PRUNE_TOL};
pub use mixed::MixedForm;
pub use quadrature::gauss_legendre_unit;
pub use series::{ahat_form, exp_form, CurvatureInput};
