use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CertificateReport, ExponentTriple};
use crate::besicovitch::{build_perron_family, PerronParams};
use crate::domains::{classify_vector, configuration_triangle, Degeneracy, GammaVec};
use crate::error::{Error, Result};
use crate::forms::{lambda_tilde_measured, square_function_norm, Sliding, MAX_EVALS};
use crate::geometry::{pairwise_disjoint, ConvexPolygon, OrientedRect};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateOptions {
    /// The Q-families are long enough that `g(t) = |R_n|` on this window.
    pub window: (f64, f64),
    pub base_angle: f64,
    pub half_aperture: f64,
    pub overlap_parameter: f64,
    pub tol: f64,
}

impl Default for DegenerateOptions {
    fn default() -> Self {
        let p = PerronParams::default();
        DegenerateOptions {
            window: (1.5, 2.5),
            base_angle: p.base_angle,
            half_aperture: p.half_aperture,
            overlap_parameter: p.overlap_parameter,
            tol: 1e-9,
        }
    }
}

const FAMILY_NAMES: [&str; 3] = ["Q1", "Q2", "Q3"];

/// Normals `(v_n, λ v_n, -(1 + λ) v_n)` on a Perron family; both non-`i`
/// inputs are rectangles swept from `R_n` along `v_n` over the t-window.
pub fn degenerate_certificate(
    lambda: f64,
    p: &ExponentTriple,
    depths: &[u32],
    opts: &DegenerateOptions,
) -> Result<CertificateReport> {
    let coeff = [1.0, lambda, -(1.0 + lambda)];
    if (lambda - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidInput("lambda = 1".into()));
    }
    if !lambda.is_finite() || coeff.iter().any(|c| c.abs() < 1e-12) {
        return Err(Error::InvalidInput(format!(
            "lambda = {lambda} makes a component vanish"
        )));
    }
    let pv = p.values();
    if pv.iter().any(|&q| !(q > 1.0 && q.is_finite())) {
        return Err(Error::Inadmissible(format!("{p} leaves the open Banach triangle")));
    }
    let small: Vec<usize> = (1..=3).filter(|&j| pv[j - 1] < 2.0).collect();
    let i = match small.as_slice() {
        [i] => *i,
        _ => return Err(Error::Inadmissible(format!("{p} needs exactly one p_i < 2"))),
    };
    let others: Vec<usize> = (1..=3).filter(|&j| j != i).collect();
    let d: Vec<f64> = others.iter().map(|&j| coeff[i - 1] - coeff[j - 1]).collect();
    if d.iter().any(|x| x.abs() < 1e-12) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} gives v_i = v_j")));
    }
    let (a, b) = opts.window;
    if !(0.0 < a && a < b) {
        return Err(Error::InvalidInput(format!(
            "t-window ({a}, {b}) must satisfy 0 < a < b"
        )));
    }
    let oracle = (b / a).ln();
    let mid = 0.5 * (a + b);

    let mut report = CertificateReport::new("certify-degenerate");
    report.param("lambda", lambda);
    report.param("exponents", p);
    report.param("depths", depths);
    report.param("options", opts);
    report.param("roles", serde_json::json!({ "i": i, "others": others }));
    report.param(
        "notes",
        ["Q_j = R_n swept along (c_i - c_j) v_n for t in the window: length 1 + |c_i - c_j| (b - a)"],
    );

    let mut collinear_ok = true;
    let mut class_ok = true;
    let mut window_ok = true;
    let mut above_ok = true;
    for &depth in depths {
        let n = 1usize << depth;
        let family = build_perron_family(PerronParams {
            depth,
            base_angle: opts.base_angle,
            half_aperture: opts.half_aperture,
            overlap_parameter: opts.overlap_parameter,
        })?;
        let normals: Vec<GammaVec> = family
            .directions
            .iter()
            .map(|&v| GammaVec {
                v1: v * coeff[0],
                v2: v * coeff[1],
                v3: v * coeff[2],
            })
            .collect();
        let mut max_area: f64 = 0.0;
        for v in &normals {
            max_area = max_area.max(configuration_triangle(v).area);
            class_ok &= classify_vector(v)? == Degeneracy::Degenerate;
        }
        collinear_ok &= max_area <= 1e-10;

        let qs: Vec<Vec<OrientedRect>> = d
            .iter()
            .map(|&dj| {
                family
                    .rects
                    .iter()
                    .zip(&family.directions)
                    .map(|(r, &v)| OrientedRect {
                        center: r.center + v * (dj * mid),
                        length: r.length + dj.abs() * (b - a),
                        ..*r
                    })
                    .collect()
            })
            .collect();
        for (f, &j) in qs.iter().zip(&others) {
            if let Some(pair) = pairwise_disjoint(f).first_violation {
                return Err(Error::NotDisjoint {
                    family: FAMILY_NAMES[j - 1],
                    pair,
                });
            }
        }

        let rects = family.rect_polygons();
        let q_polys: Vec<Vec<ConvexPolygon>> = qs.iter().map(|f| f.iter().map(|r| r.to_polygon()).collect()).collect();
        let tol_n = opts.tol / n as f64;
        let per_n: Vec<(f64, f64, f64)> = (0..n)
            .into_par_iter()
            .map(|m| {
                let mut polys: [&ConvexPolygon; 3] = [&rects[m]; 3];
                for (slot, &j) in others.iter().enumerate() {
                    polys[j - 1] = &q_polys[slot][m];
                }
                let full = lambda_tilde_measured(polys[0], polys[1], polys[2], &normals[m], tol_n)?;
                let s = Sliding::new(polys, &normals[m])?;
                let mut pts = vec![a];
                pts.extend(s.breakpoints(a, b).into_iter().filter(|&t| t > a && t < b));
                pts.push(b);
                let win = integrate(|t| s.area(t) / t, &pts, tol_n, 0.0, MAX_EVALS)?;
                Ok((full.value, full.err_bound, win.value))
            })
            .collect::<Result<_>>()?;

        let lhs: f64 = per_n.iter().map(|x| x.0.abs()).sum();
        let lhs_err: f64 = per_n.iter().map(|x| x.1).sum();
        let worst_window = per_n
            .iter()
            .map(|x| (x.2 * n as f64 - oracle).abs())
            .fold(0.0, f64::max);
        window_ok &= worst_window <= 1e-3 * oracle;
        above_ok &= per_n.iter().all(|x| x.0 >= x.2 - x.1);
        let min_window = per_n.iter().map(|x| x.2).fold(f64::INFINITY, f64::min) * n as f64;

        let sq_i = square_function_norm(&rects, pv[i - 1], 1e-9)?;
        let sq_q: Vec<f64> = q_polys
            .iter()
            .zip(&others)
            .map(|(f, &j)| square_function_norm(f, pv[j - 1], 1e-9))
            .collect::<Result<_>>()?;
        let ratio = lhs / (sq_i * sq_q[0] * sq_q[1]);
        report.push_row(&[
            ("depth", depth as f64),
            ("n", n as f64),
            ("eps_meas", family.achieved_eps.value),
            ("max_triangle_area", max_area),
            ("lhs", lhs),
            ("lhs_err", lhs_err),
            ("min_window_times_n", min_window),
            ("window_oracle", oracle),
            ("sq_i", sq_i),
            ("sq_first_q", sq_q[0]),
            ("sq_second_q", sq_q[1]),
            ("certified_ratio", ratio),
        ])?;
    }
    report.verdict(
        "triangle_collinear",
        collinear_ok,
        "configuration-triangle area <= 1e-10 for every n",
    );
    report.verdict(
        "degenerate_not_strong",
        class_ok,
        "every normal classifies as degenerate",
    );
    report.verdict(
        "q_families_disjoint",
        true,
        "both Q-families pairwise disjoint at every depth",
    );
    report.verdict(
        "window_oracle",
        window_ok,
        format!("n * window integral within 1e-3 (relative) of ln({b}/{a})"),
    );
    report.verdict("lhs_above_window", above_ok, "lambda_n >= its window part for every n");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_one_rejected() {
        let p: ExponentTriple = "4,8,8/5".parse().unwrap();
        assert!(degenerate_certificate(1.0, &p, &[2], &DegenerateOptions::default()).is_err());
        assert!(degenerate_certificate(-1.0, &p, &[2], &DegenerateOptions::default()).is_err());
    }

    #[test]
    fn small_depth_meets_window_oracle() {
        let p: ExponentTriple = "4,8,8/5".parse().unwrap();
        let r = degenerate_certificate(2.0, &p, &[2, 3], &DegenerateOptions::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.verdicts);
        for row in &r.rows {
            assert!((row["min_window_times_n"] - (5.0f64 / 3.0).ln()).abs() < 1e-8);
        }
    }
}
