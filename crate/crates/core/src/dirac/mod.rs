//! Twisted Dirac operators on `T^1` and `T^3` in a truncated Fourier basis.
//!
//! `D_A = Σ_j c_j (∂_j + A_j)` acts on `e^{2πik·x} ⊗ C^{spin} ⊗ C^k`. Fourier
//! directions on which the potential does not depend carry a conserved
//! momentum, and the operator splits into one dense block per value of it.

mod clifford;
mod curvature_scale;
mod layout;
mod pairing;
mod spectrum;
mod weitzenbock;

pub use clifford::CliffordRep;
pub use curvature_scale::{curvature_scale, r_of_a, solve_curvature_scale, CurvatureScale, BISECTION_TOL};
pub use layout::{BlockLabel, BlockLayout};
pub use pairing::{cl_pairing, cl_pairings, PAIRING_IMAG_TOL};
pub use spectrum::{
    assemble, assemble_labels, assemble_window, cutoff_drift, eig, eig_block, stable_cutoff, windowed_spectrum, BlockEigen,
    DiracBlock, DiracBlocks, EigenSystem, SpectrumEntry, CUTOFF_DRIFT_TOL, EIGEN_TOL, HERMITIAN_TOL,
};
pub use weitzenbock::{weitzenbock_residual, weitzenbock_residual_with};
