use rayon::prelude::*;

use super::{fit_line, CertificateReport};
use crate::domains::{classify_vector, Degeneracy, GammaVec};
use crate::error::{Error, Result};
use crate::forms::s_w_l1_norm;
use crate::geometry::{OrientedRect, Vec2};

/// `‖S_w(χ_R, χ_R)‖_1 / (‖χ_R‖_p ‖χ_R‖_p')` for `ε x 1` rectangles parallel
/// to `w1 - w2`, with `w = (v1 - v3, v2 - v3)`.
pub fn s_l1_certificate(v: &GammaVec, p: f64, eps: &[f64]) -> Result<CertificateReport> {
    if classify_vector(v)? != Degeneracy::Nondegenerate {
        return Err(Error::InvalidInput("Gamma vector must be nondegenerate".into()));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("p = {p} outside (1, inf)")));
    }
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
        return Err(Error::InvalidInput(
            "eps sweep needs at least two values in (0, 1]".into(),
        ));
    }
    let (w1, w2) = (v.v1 - v.v3, v.v2 - v.v3);
    let dir = (w1 - w2).normalized().ok_or(Error::ZeroVector)?;
    let pd = p / (p - 1.0);

    let l1: Vec<f64> = eps
        .par_iter()
        .map(|&e| s_w_l1_norm(&OrientedRect::new(Vec2::ZERO, dir, 1.0, e)?, w1, w2, 1e-9 * e))
        .collect::<Result<_>>()?;

    let mut report = CertificateReport::new("s-l1");
    report.param("v", v);
    report.param("p", p);
    report.param("eps", eps);
    report.param("w1", w1);
    report.param("w2", w2);
    let mut ratios = Vec::new();
    for (&e, &l) in eps.iter().zip(&l1) {
        let norm = e.powf(1.0 / p) * e.powf(1.0 / pd);
        let ratio = l / norm;
        ratios.push(ratio);
        report.push_row(&[
            ("eps", e),
            ("log_inv_eps", -e.ln()),
            ("l1_norm", l),
            ("norm_product", norm),
            ("certified_ratio", ratio),
        ])?;
    }

    let mut order: Vec<usize> = (0..eps.len()).collect();
    order.sort_by(|&a, &b| eps[b].total_cmp(&eps[a]));
    let increasing = order.windows(2).all(|w| ratios[w[1]] > ratios[w[0]]);
    let (big, small) = (order[0], order[order.len() - 1]);
    let growth = ratios[small] / ratios[big];
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let fit = fit_line(&xs, &ratios)?;
    report.fit("growth", growth);
    report.fit("affine_slope", fit.slope);
    report.fit("affine_intercept", fit.intercept);
    report.fit("affine_max_rel_residual", fit.max_rel_residual);
    report.verdict(
        "ratio_increasing",
        increasing,
        "ratio strictly increasing as eps decreases",
    );
    report.verdict(
        "growth",
        growth >= 1.5,
        format!("ratio(smallest eps) / ratio(largest eps) = {growth} >= 1.5"),
    );
    report.verdict(
        "affine_in_log",
        fit.slope > 0.0 && fit.max_rel_residual < 0.05,
        format!(
            "ratio ~ {} log(1/eps) + {}, max relative residual {} < 5%",
            fit.slope, fit.intercept, fit.max_rel_residual
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_product_is_eps() {
        let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        let r = s_l1_certificate(&v, 3.0, &[0.125, 0.0625]).unwrap();
        for row in &r.rows {
            assert!((row["norm_product"] - row["eps"]).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_rejected() {
        let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0));
        assert!(s_l1_certificate(&v, 2.0, &[0.125, 0.0625]).is_err());
    }
}
