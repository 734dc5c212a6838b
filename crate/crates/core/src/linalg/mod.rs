//! Dense complex linear algebra used by the operator and forms layers.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eigen, orthogonality_defect, residual, HermitianEigen, NoConvergence};
pub use matrix::{dot, norm, CMat};
