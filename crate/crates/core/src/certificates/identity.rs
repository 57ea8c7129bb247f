use super::CertificateReport;
use crate::domains::GammaVec;
use crate::error::{Error, Result};
use crate::forms::{identity_parts, FrequencyGrid, GaussianTriple};
use crate::geometry::Vec2;

/// Three fixed modulated Gaussian triples.
pub fn default_triples() -> Vec<GaussianTriple> {
    let v = Vec2::new;
    vec![
        GaussianTriple {
            centers: [v(0.1, -0.2), v(-0.3, 0.1), v(0.2, 0.25)],
            freqs: [v(0.4, 0.1), v(-0.2, 0.3), v(-0.1, -0.5)],
        },
        GaussianTriple {
            centers: [v(0.0, 0.0), v(0.5, 0.0), v(0.0, -0.4)],
            freqs: [v(0.0, 0.0), v(0.3, -0.3), v(-0.25, 0.2)],
        },
        GaussianTriple {
            centers: [v(-0.2, 0.3), v(0.15, 0.15), v(0.3, -0.1)],
            freqs: [v(0.6, -0.2), v(-0.4, -0.1), v(0.1, 0.45)],
        },
    ]
}

/// `Λ̃ = -iπ(2Λ_P - Λ₀)` checked on each triple at spacing `h` and `h/2`.
pub fn identity_certificate(triples: &[GaussianTriple], v: &GammaVec, spacing: f64) -> Result<CertificateReport> {
    if triples.is_empty() {
        return Err(Error::InvalidInput("no Gaussian triples".into()));
    }
    let mut report = CertificateReport::new("identity");
    report.param("v", v);
    report.param("spacing", spacing);
    report.param("triples", triples);
    let (mut small_ok, mut decrease_ok) = (true, true);
    for (idx, t) in triples.iter().enumerate() {
        let coarse = identity_parts(t, v, &FrequencyGrid::new(spacing))?;
        let fine = identity_parts(t, v, &FrequencyGrid::new(spacing / 2.0))?;
        small_ok &= coarse.residual <= 5e-2;
        decrease_ok &= fine.residual < coarse.residual;
        report.push_row(&[
            ("triple", idx as f64),
            ("residual", coarse.residual),
            ("residual_half_spacing", fine.residual),
            ("lambda_tilde_re", coarse.lambda_tilde.re),
            ("lambda_tilde_im", coarse.lambda_tilde.im),
            ("lambda_half_re", fine.lambda_half.re),
            ("lambda_half_im", fine.lambda_half.im),
            ("lambda_zero_re", coarse.lambda_zero.re),
            ("lambda_zero_im", coarse.lambda_zero.im),
        ])?;
    }
    report.verdict(
        "residual_small",
        small_ok,
        format!("residual <= 5e-2 at spacing {spacing}"),
    );
    report.verdict(
        "residual_decreases",
        decrease_ok,
        "residual decreases when the spacing halves",
    );
    Ok(report)
}
