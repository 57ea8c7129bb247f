use serde::{Deserialize, Serialize};

use crate::domains::GammaVec;
use crate::error::{Error, Result};
use crate::geometry::{intersect_convex, ConvexPolygon, Measured, Vec2};
use crate::quadrature::integrate;

/// Evaluation budget of one form value.
pub const MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaProfile {
    pub ts: Vec<f64>,
    pub gs: Vec<f64>,
    /// Every `t` where `g` may fail to be quadratic.
    pub breakpoints: Vec<f64>,
    pub support: (f64, f64),
}

/// Three convex sets sliding along the components of a Gamma vector.
pub struct Sliding<'a> {
    polys: [&'a ConvexPolygon; 3],
    v: [Vec2; 3],
}

impl<'a> Sliding<'a> {
    pub fn new(polys: [&'a ConvexPolygon; 3], v: &GammaVec) -> Result<Self> {
        if polys.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidInput("sliding sets must be nonempty".into()));
        }
        if v.max_component() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Sliding {
            polys,
            v: v.components(),
        })
    }

    /// `g(t) = area(A1 + t v1 ∩ A2 + t v2 ∩ A3 + t v3)`.
    pub fn area(&self, t: f64) -> f64 {
        // Shift by -t v1 so the first polygon stays put.
        let b = self.polys[1].translate((self.v[1] - self.v[0]) * t);
        let ab = intersect_convex(self.polys[0], &b);
        if ab.is_empty() {
            return 0.0;
        }
        let c = self.polys[2].translate((self.v[2] - self.v[0]) * t);
        intersect_convex(&ab, &c).area()
    }

    /// Interval outside of which some pair is separated along its
    /// relative velocity.
    pub fn support_bracket(&self) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let u = self.v[j] - self.v[k];
            let uu = u.norm_sq();
            if uu == 0.0 {
                continue;
            }
            // A_j + t v_j meets A_k + t v_k only if t u ∈ A_k - A_j.
            let (kj0, kj1) = extent(self.polys[k], u);
            let (aj0, aj1) = extent(self.polys[j], u);
            lo = lo.max((kj0 - aj1) / uu);
            hi = hi.min((kj1 - aj0) / uu);
        }
        (lo, hi)
    }

    /// Candidate kinks of `g` inside `[lo, hi]`: a vertex of one set crossing
    /// an edge of another, and three edges of different sets becoming
    /// concurrent.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let edges: Vec<Vec<(Vec2, Vec2)>> = self
            .polys
            .iter()
            .map(|p| {
                let v = p.vertices();
                (0..v.len()).map(|i| (v[i], v[(i + 1) % v.len()])).collect()
            })
            .collect();
        let seg_tol = 1e-9;
        let mut out = vec![lo, hi];
        let keep = |t: f64, out: &mut Vec<f64>| {
            if t.is_finite() && t > lo && t < hi {
                out.push(t);
            }
        };
        for j in 0..3 {
            for k in 0..3 {
                if j == k {
                    continue;
                }
                let rel = self.v[j] - self.v[k];
                for &p in self.polys[j].vertices() {
                    for &(a, b) in &edges[k] {
                        // p + t rel on the segment a..b.
                        let e = b - a;
                        let den = e.cross(rel);
                        if den == 0.0 {
                            continue;
                        }
                        let t = (p - a).cross(e) / den;
                        let q = p + rel * t - a;
                        let s = q.dot(e) / e.norm_sq();
                        if s >= -seg_tol && s <= 1.0 + seg_tol {
                            keep(t, &mut out);
                        }
                    }
                }
            }
        }
        for &(a0, a1) in &edges[0] {
            for &(b0, b1) in &edges[1] {
                for &(c0, c1) in &edges[2] {
                    if let Some(t) = self.concurrency([(a0, a1), (b0, b1), (c0, c1)], seg_tol) {
                        keep(t, &mut out);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        let scale = lo.abs().max(hi.abs()).max(1.0);
        out.dedup_by(|b, a| (*b - *a).abs() <= 1e-13 * scale);
        out
    }

    /// `t` at which the three moving edge lines pass through one point lying
    /// on all three segments.
    fn concurrency(&self, seg: [(Vec2, Vec2); 3], seg_tol: f64) -> Option<f64> {
        // Line j: n_j . x = c_j + t n_j . v_j.
        let mut rows = [[0.0; 4]; 3];
        for j in 0..3 {
            let (a, b) = seg[j];
            let n = (b - a).perp();
            rows[j] = [n.x, n.y, n.dot(a), n.dot(self.v[j])];
        }
        let det = |c: usize| {
            let m = |r: usize, k: usize| if k == 2 { rows[r][c] } else { rows[r][k] };
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        let (d0, d1) = (det(2), det(3));
        if d1 == 0.0 {
            return None;
        }
        let t = -d0 / d1;
        // Point where lines 0 and 1 meet at time t.
        let (r0, r1) = (rows[0], rows[1]);
        let den = r0[0] * r1[1] - r0[1] * r1[0];
        if den == 0.0 {
            return None;
        }
        let (c0, c1) = (r0[2] + t * r0[3], r1[2] + t * r1[3]);
        let x = Vec2::new((c0 * r1[1] - r0[1] * c1) / den, (r0[0] * c1 - c0 * r1[0]) / den);
        for j in 0..3 {
            let (a, b) = seg[j];
            let p = x - self.v[j] * t;
            let e = b - a;
            let s = (p - a).dot(e) / e.norm_sq();
            if s < -seg_tol || s > 1.0 + seg_tol {
                return None;
            }
        }
        Some(t)
    }
}

fn extent(p: &ConvexPolygon, u: Vec2) -> (f64, f64) {
    p.vertices()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v.dot(u)), b.max(v.dot(u)))
        })
}

/// Samples `g` until neighbouring values differ by less than
/// `resolution * max g`.
pub fn area_profile(
    a1: &ConvexPolygon,
    a2: &ConvexPolygon,
    a3: &ConvexPolygon,
    v: &GammaVec,
    resolution: f64,
) -> Result<AreaProfile> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let s = Sliding::new([a1, a2, a3], v)?;
    let (lo, hi) = s.support_bracket();
    if !(lo <= hi) {
        return Ok(AreaProfile {
            ts: vec![],
            gs: vec![],
            breakpoints: vec![],
            support: (0.0, 0.0),
        });
    }
    let breakpoints = s.breakpoints(lo, hi);
    let mut pts: Vec<(f64, f64)> = breakpoints.iter().map(|&t| (t, s.area(t))).collect();
    let mut gmax = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    // Midpoints of each piece reveal interior maxima.
    for w in breakpoints.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        gmax = gmax.max(s.area(m));
    }
    let cap = 1 << 20;
    loop {
        let mut next = Vec::with_capacity(pts.len() * 2);
        let mut refined = false;
        for w in pts.windows(2) {
            next.push(w[0]);
            if (w[1].1 - w[0].1).abs() >= resolution * gmax && w[1].0 - w[0].0 > 1e-12 {
                let m = 0.5 * (w[0].0 + w[1].0);
                let g = s.area(m);
                gmax = gmax.max(g);
                next.push((m, g));
                refined = true;
            }
        }
        next.push(*pts.last().expect("two bracket points"));
        pts = next;
        if !refined || pts.len() > cap {
            break;
        }
    }
    let first = pts.iter().position(|p| p.1 > 0.0);
    let last = pts.iter().rposition(|p| p.1 > 0.0);
    let support = match (first, last) {
        (Some(f), Some(l)) => (pts[f.saturating_sub(1)].0, pts[(l + 1).min(pts.len() - 1)].0),
        _ => (0.0, 0.0),
    };
    Ok(AreaProfile {
        ts: pts.iter().map(|p| p.0).collect(),
        gs: pts.iter().map(|p| p.1).collect(),
        breakpoints,
        support,
    })
}

/// `p.v. ∫ g(t) dt / t` as `∫_0^∞ (g(t) - g(-t)) / t dt`, with every kink of
/// `g` as a quadrature breakpoint.
pub fn lambda_tilde_measured(
    a1: &ConvexPolygon,
    a2: &ConvexPolygon,
    a3: &ConvexPolygon,
    v: &GammaVec,
    tol: f64,
) -> Result<Measured> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let s = Sliding::new([a1, a2, a3], v)?;
    let (lo, hi) = s.support_bracket();
    if !(lo <= hi) {
        return Ok(Measured {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    let bp = s.breakpoints(lo, hi);
    let tmax = lo.abs().max(hi.abs());
    let mut pts: Vec<f64> = bp.iter().map(|t| t.abs()).chain([0.0, tmax]).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|b, a| (*b - *a).abs() <= 1e-13 * tmax.max(1.0));
    let q = integrate(|t| (s.area(t) - s.area(-t)) / t, &pts, 0.5 * tol, 0.0, MAX_EVALS)?;
    Ok(Measured {
        value: q.value,
        err_bound: q.error,
    })
}

pub fn lambda_tilde_indicator(
    a1: &ConvexPolygon,
    a2: &ConvexPolygon,
    a3: &ConvexPolygon,
    v: &GammaVec,
    tol: f64,
) -> Result<f64> {
    Ok(lambda_tilde_measured(a1, a2, a3, v, tol)?.value)
}
