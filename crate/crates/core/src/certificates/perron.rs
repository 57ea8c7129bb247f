use super::CertificateReport;
use crate::besicovitch::{build_perron_family, verify_family, BesicovitchFamily, PerronParams, EPS_TOL};
use crate::error::{Error, Result};
use crate::forms::square_function_norm;

/// Builds and verifies Perron families over `depths`; checks
/// `‖(Σχ²)^{1/2}‖_p <= ε^{(2-p)/(2p)}` for `p < 2`. Returns the deepest
/// family alongside the report.
pub fn perron_certificate(
    params: PerronParams,
    depths: &[u32],
    p: f64,
) -> Result<(CertificateReport, BesicovitchFamily)> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidInput(format!(
            "square-function exponent {p} outside (1, 2)"
        )));
    }
    let holder_exp = (2.0 - p) / (2.0 * p);
    let mut report = CertificateReport::new("perron");
    report.param("params", params);
    report.param("depths", depths);
    report.param("p", p);
    let (mut valid, mut holder_ok) = (true, true);
    let mut last = None;
    for &depth in depths {
        let family = build_perron_family(PerronParams { depth, ..params })?;
        let check = verify_family(&family, f64::INFINITY);
        valid &= check.dimensions_ok && check.reaches_disjoint && check.contained;
        let sq = square_function_norm(&family.rect_polygons(), p, EPS_TOL)?;
        let eps = family.achieved_eps;
        let bound = eps.value.powf(holder_exp);
        holder_ok &= sq <= bound + EPS_TOL;
        report.push_row(&[
            ("depth", depth as f64),
            ("n", family.len() as f64),
            ("eps_meas", eps.value),
            ("eps_err", eps.err_bound),
            ("square_function", sq),
            ("holder_bound", bound),
        ])?;
        last = Some(family);
    }
    report.verdict(
        "families_valid",
        valid,
        "dimensions, reach disjointness and containment in K*",
    );
    report.verdict(
        "holder_bound",
        holder_ok,
        format!("square function <= eps^{holder_exp} + 1e-3"),
    );
    let family = last.ok_or_else(|| Error::InvalidInput("no depths".into()))?;
    Ok((report, family))
}
