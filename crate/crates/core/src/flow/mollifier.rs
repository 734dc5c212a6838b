use crate::math::{erf, sqrt, PI};

/// `Φ(λ) = ∫_0^λ e^{-p²t} dp = (√π / 2√t) · erf(λ√t)`.
///
/// Odd and strictly increasing, with limits `±(π/4t)^{1/2}`.
pub fn phi(lambda: f64, t: f64) -> f64 {
    assert!(t > 0.0, "phi needs t > 0");
    let st = sqrt(t);
    0.5 * sqrt(PI) / st * erf(lambda * st)
}

/// Right-hand side of the envelope `|t^{1/2} Φ(R t^{-1/2}) - (π/4)^{1/2}| <= e^{-R²} / 2R`.
pub fn phi_envelope(r: f64) -> f64 {
    crate::math::exp(-r * r) / (2.0 * r)
}
