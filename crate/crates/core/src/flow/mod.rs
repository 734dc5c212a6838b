//! Spectral flow along straight paths of connections: the exact signed
//! crossing count and the heat-mollified estimator that approximates it.

mod estimator;
mod eta;
mod mollifier;
mod path;
mod tracker;

pub use estimator::{
    choose_params, estimator_flow, simpson, wp, wp_with_window, EstimatorParams, EstimatorResult, WpSample,
};
pub use eta::{eta_difference, eta_from};
pub use mollifier::{phi, phi_envelope};
pub use path::PathSpec;
pub use tracker::{
    exact_flow, CrossingRecord, SpectralFlowResult, TouchRecord, AMBIGUITY_MARGIN, BISECTION_WIDTH, CROSSING_TOL,
    MAX_REFINEMENT_LEVELS, SIGN_BAND,
};
