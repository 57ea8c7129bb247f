use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{loglog_slope, CertificateReport};
use crate::domains::{gamma_normal, DomainKind, GammaVec, LevelSetDomain, R4};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyOptions {
    /// Proposals per `r`, uniform in the cube `[-1, 1]^4` of Gamma coordinates.
    pub samples: u64,
    pub seed: u64,
}

impl Default for TangencyOptions {
    fn default() -> Self {
        TangencyOptions {
            samples: 10_000_000,
            seed: 0x5eed,
        }
    }
}

const CHUNK: u64 = 1 << 16;

/// Orthonormal basis of `{(a, b, c) : a + b + c = 0}`.
const E_A: [f64; 3] = [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2, 0.0];
const E_B: [f64; 3] = [0.408_248_290_463_863, 0.408_248_290_463_863, -0.816_496_580_927_726];

/// Coordinates `(α_x, β_x, α_y, β_y)` to `(ζ_1, ζ_2) ∈ R^4`.
fn lift(c: [f64; 4]) -> R4 {
    let x = [0, 1, 2].map(|j| c[0] * E_A[j] + c[1] * E_B[j]);
    let y = [0, 1, 2].map(|j| c[2] * E_A[j] + c[3] * E_B[j]);
    [x[0], y[0], x[1], y[1]]
}

/// Counts points of the unit ball where `ξ + ζ/r ∈ D` and `ζ · v < 0`
/// disagree, and points of the ball, over `count` proposals of chunk `c`.
fn chunk_counts(domain: &LevelSetDomain, x0: &R4, g: &R4, rs: &[f64], seed: u64, c: u64, count: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(c);
    let mut hits = vec![0u64; rs.len()];
    for _ in 0..count {
        let z: [f64; 4] = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
        if z.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            continue;
        }
        let eta = lift(z);
        let half = eta.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() < 0.0;
        for (h, &r) in hits.iter_mut().zip(rs) {
            let x = [0, 1, 2, 3].map(|m| x0[m] + eta[m] / r);
            if (domain.value(&x) < 0.0) != half {
                *h += 1;
            }
        }
    }
    hits
}

/// Monte Carlo measure of `(r(D - ξ) Δ P) ∩ B_1` in Gamma, with `P` the
/// interior half-space at the boundary point `x0`.
pub fn tangency_certificate(
    domain: &LevelSetDomain,
    x0: &R4,
    rs: &[f64],
    opts: &TangencyOptions,
) -> Result<CertificateReport> {
    let v: GammaVec = gamma_normal(domain, x0)?;
    let g = domain.gradient(x0);
    if rs.is_empty() || rs.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidInput("r sweep must be nonempty and positive".into()));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let chunks = opts.samples.div_ceil(CHUNK);
    let totals = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(opts.samples - c * CHUNK);
            chunk_counts(domain, x0, &g, rs, opts.seed, c, count)
        })
        .reduce(
            || vec![0u64; rs.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let mut report = CertificateReport::new("tangency");
    report.param("domain", &domain.name);
    report.param("point", x0);
    report.param("normal", v);
    report.param("r", rs);
    report.param("options", opts);
    let m = opts.samples as f64;
    let mut measures = Vec::new();
    for (&r, &h) in rs.iter().zip(&totals) {
        let frac = h as f64 / m;
        let measure = 16.0 * frac;
        let se = 16.0 * (frac * (1.0 - frac) / m).sqrt();
        measures.push(measure);
        report.push_row(&[("r", r), ("measure", measure), ("std_err", se), ("hits", h as f64)])?;
    }

    if measures.iter().all(|&x| x == 0.0) {
        report.verdict("exact_tangency", true, "symmetric difference empty at every r");
        return Ok(report);
    }
    let mut order: Vec<usize> = (0..rs.len()).collect();
    order.sort_by(|&a, &b| rs[a].total_cmp(&rs[b]));
    let decreasing = order.windows(2).all(|w| measures[w[1]] < measures[w[0]]);
    report.verdict("decreasing", decreasing, "measure strictly decreasing in r");
    if measures.iter().all(|&x| x > 0.0) && rs.len() >= 2 {
        let slope = loglog_slope(rs, &measures)?;
        report.fit("loglog_slope", slope);
        if matches!(domain.kind, DomainKind::Ball | DomainKind::Ellipsoid(_)) {
            report.verdict(
                "taylor_slope",
                (slope + 1.0).abs() <= 0.3,
                format!("log-log slope {slope} within -1 +- 0.3"),
            );
        }
    }
    Ok(report)
}
