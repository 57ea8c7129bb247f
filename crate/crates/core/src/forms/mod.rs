//! Trilinear forms on indicator and Gaussian inputs, the bilinear operator
//! `S_w`, and square-function norms.

mod identity;
mod profile;
mod sw;

pub use identity::{
    identity_parts, identity_residual, lambda_half_space, lambda_tilde_gaussian, FrequencyGrid, GaussianTriple,
    IdentityParts,
};
pub use profile::{area_profile, lambda_tilde_indicator, lambda_tilde_measured, AreaProfile, Sliding, MAX_EVALS};
pub use sw::{s_w_l1_norm, s_w_value};

use crate::error::{Error, Result};
use crate::geometry::{count_lp_integral, ConvexPolygon};

/// `‖(Σ χ_n²)^{1/2}‖_p = (∫ (Σ χ_n)^{p/2})^{1/p}`.
pub fn square_function_norm(polys: &[ConvexPolygon], p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("exponent p = {p} must be positive")));
    }
    Ok(count_lp_integral(polys, p / 2.0, tol)?.powf(1.0 / p))
}
