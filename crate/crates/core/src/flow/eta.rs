use super::path::PathSpec;
use super::tracker::SpectralFlowResult;
use crate::forms::{prediction, CurvatureInput};
use crate::Result;

/// `η_{A_1} - η_{A_0}` recovered from the index formula with the index
/// replaced by the exact flow: `2·(prediction - f)`.
pub fn eta_difference(path: &PathSpec, flow: &SpectralFlowResult, r2: &CurvatureInput) -> Result<f64> {
    let p = prediction(path.start(), &path.end()?, r2)?;
    Ok(eta_from(p.value, flow.f))
}

pub fn eta_from(prediction: f64, f: i64) -> f64 {
    2.0 * (prediction - f as f64)
}
