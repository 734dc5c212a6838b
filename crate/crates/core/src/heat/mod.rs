//! Heat-trace diagnostics computed from certified eigensums: traces,
//! diagonal kernels, eigenvalue counts and the weighted trace whose density
//! drives the estimator.

mod bounds;
mod density;
mod kernel;
mod trace;

pub use bounds::{fit_kernel_bound, log_spaced, uniform_points, HeatProbe, KernelBoundFit};
pub use density::{curvature_grid, density_form, density_prefactor, p_lambda, PLambda};
pub use kernel::{clifford_at, diag_kernel, pointwise_density_check, psd_defect, PSD_TOL};
pub use trace::{
    count_eigs, heat_trace, heat_window, min_admissible_t, poisson_free_trace, weyl_sweep, HeatTrace, WeylSample,
    TRUNCATION_WEIGHT,
};
