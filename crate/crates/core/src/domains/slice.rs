use serde::{Deserialize, Serialize};

use super::{normal_from_gradient, GammaVec, LevelSetDomain, R4};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// The plane where the `j0`-th Gamma component equals `fixed_point`.
///
/// Free coordinates `s` embed into `R^4` as `(fixed, s)` for `j0 = 1`,
/// `(s, fixed)` for `j0 = 2` and `(s, -fixed - s)` for `j0 = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub j0: usize,
    pub fixed_point: Vec2,
}

impl SliceSpec {
    pub fn new(j0: usize, fixed_point: Vec2) -> Result<Self> {
        if !(1..=3).contains(&j0) {
            return Err(Error::InvalidInput(format!("slice index {j0} outside 1..=3")));
        }
        Ok(SliceSpec { j0, fixed_point })
    }

    pub fn embed(&self, s: Vec2) -> R4 {
        let c = self.fixed_point;
        match self.j0 {
            1 => [c.x, c.y, s.x, s.y],
            2 => [s.x, s.y, c.x, c.y],
            _ => [s.x, s.y, -c.x - s.x, -c.y - s.y],
        }
    }

    /// Columns of the embedding's Jacobian.
    fn jacobian(&self) -> [R4; 2] {
        match self.j0 {
            1 => [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
            2 => [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
            _ => [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]],
        }
    }

    /// Value, gradient and Hessian of `F` restricted to the slice plane.
    fn restricted(&self, d: &LevelSetDomain, s: Vec2) -> (f64, Vec2, [[f64; 2]; 2]) {
        let x = self.embed(s);
        let g = d.gradient(&x);
        let h = d.hessian(&x);
        let j = self.jacobian();
        let dot = |a: &R4, b: &R4| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let hj = |c: &R4| -> R4 { [0, 1, 2, 3].map(|r| dot(&h[r], c)) };
        let (h0, h1) = (hj(&j[0]), hj(&j[1]));
        (
            d.value(&x),
            Vec2::new(dot(&g, &j[0]), dot(&g, &j[1])),
            [[dot(&j[0], &h0), dot(&j[0], &h1)], [dot(&j[1], &h0), dot(&j[1], &h1)]],
        )
    }
}

/// Signed curvature of the slice curve `{F = 0}` at slice coordinates `s`;
/// positive when the curve bends toward `{F < 0}`.
pub fn slice_curvature(domain: &LevelSetDomain, slice: &SliceSpec, s: Vec2) -> Result<f64> {
    let (f, g, h) = slice.restricted(domain, s);
    if !(f.abs() < 1e-8) {
        return Err(Error::NotOnBoundary(f.abs()));
    }
    let full = domain.gradient(&slice.embed(s));
    let full_n = full.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(full_n >= 1e-8) {
        return Err(Error::DegenerateGradient(full_n));
    }
    let gn = g.norm();
    if !(gn >= 1e-8) {
        return Err(Error::NotACurve(gn));
    }
    let (fx, fy) = (g.x, g.y);
    Ok((h[1][1] * fx * fx - 2.0 * h[0][1] * fx * fy + h[0][0] * fy * fy) / (gn * gn * gn))
}

/// Where to sample a slice curve: arc length measured from the projection
/// of `seed`, positive in the direction `(-f_y, f_x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub seed: Vec2,
    pub range: (f64, f64),
    pub count: usize,
}

impl ArcSpec {
    /// Arc parameters at the cell midpoints of `range`.
    pub fn samples(&self) -> Vec<f64> {
        let (a, b) = self.range;
        let h = (b - a) / self.count as f64;
        (0..self.count).map(|n| a + (n as f64 + 0.5) * h).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub arc: f64,
    pub slice_point: Vec2,
    pub point: R4,
    /// Outward normal scaled so that `|w| = 1`.
    pub normal: GammaVec,
    pub w: Vec2,
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosingBall {
    pub center: [f64; 6],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionField {
    pub samples: Vec<DirectionSample>,
    /// Ball in `R^6` containing every sampled normal.
    pub a_star: EnclosingBall,
}

impl DirectionField {
    pub fn directions(&self) -> Vec<Vec2> {
        self.samples.iter().map(|s| s.w).collect()
    }
}

const STEP: f64 = 1e-2;
const PROJ_TOL: f64 = 1e-10;

fn project(domain: &LevelSetDomain, slice: &SliceSpec, mut s: Vec2) -> Result<Vec2> {
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let (f, g, _) = slice.restricted(domain, s);
        let gn2 = g.norm_sq();
        if !(gn2.sqrt() >= 1e-8) {
            return Err(Error::NotACurve(gn2.sqrt()));
        }
        best = best.min(f.abs());
        if f.abs() <= 1e-14 {
            return Ok(s);
        }
        s = s - g * (f / gn2);
    }
    let f = slice.restricted(domain, s).0.abs();
    if f <= PROJ_TOL {
        Ok(s)
    } else {
        Err(Error::NotOnBoundary(best.min(f)))
    }
}

fn unit_tangent(domain: &LevelSetDomain, slice: &SliceSpec, s: Vec2) -> Result<Vec2> {
    let g = slice.restricted(domain, s).1;
    g.perp().normalized().ok_or(Error::NotACurve(0.0))
}

/// Arc length of the short curve piece spanning a chord.
fn arc_of_chord(c: f64, k0: f64, k1: f64) -> f64 {
    let k2 = 0.5 * (k0 * k0 + k1 * k1);
    c * (1.0 + k2 * c * c / 24.0)
}

/// Predictor-corrector step of arc length `h` (sign gives direction).
fn step(domain: &LevelSetDomain, slice: &SliceSpec, s: Vec2, h: f64) -> Result<(Vec2, f64)> {
    let t = unit_tangent(domain, slice, s)?;
    let k0 = slice_curvature(domain, slice, s).unwrap_or(0.0);
    let mut c = h.abs();
    let mut next = project(domain, slice, s + t * (c * h.signum()))?;
    for _ in 0..4 {
        let k1 = slice_curvature(domain, slice, next).unwrap_or(0.0);
        let arc = arc_of_chord((next - s).norm(), k0, k1);
        if (arc - h.abs()).abs() <= 1e-14 {
            return Ok((next, arc));
        }
        c += h.abs() - arc;
        next = project(domain, slice, s + t * (c * h.signum()))?;
    }
    let k1 = slice_curvature(domain, slice, next).unwrap_or(0.0);
    Ok((next, arc_of_chord((next - s).norm(), k0, k1)))
}

/// Points of the slice curve at the given arc parameters.
fn trace(domain: &LevelSetDomain, slice: &SliceSpec, seed: Vec2, arcs: &[f64]) -> Result<Vec<Vec2>> {
    let origin = project(domain, slice, seed)?;
    let mut out = vec![origin; arcs.len()];
    for sign in [1.0, -1.0] {
        let mut idx: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i] * sign > 0.0).collect();
        idx.sort_by(|&a, &b| (arcs[a] * sign).total_cmp(&(arcs[b] * sign)));
        let (mut s, mut done) = (origin, 0.0);
        for i in idx {
            let target = arcs[i] * sign;
            while target - done > STEP {
                let (n, a) = step(domain, slice, s, STEP * sign)?;
                s = n;
                done += a;
            }
            if target > done {
                let (n, a) = step(domain, slice, s, (target - done) * sign)?;
                s = n;
                done += a;
            }
            out[i] = s;
        }
    }
    Ok(out)
}

/// Samples of the unit direction field `w` along a slice curve.
///
/// Fails with a zero-curvature error if the curvature vanishes at a sample
/// or the angles of `w` are not strictly monotone.
pub fn direction_field(domain: &LevelSetDomain, slice: &SliceSpec, arc: &ArcSpec) -> Result<DirectionField> {
    if arc.count == 0 || !(arc.range.1 > arc.range.0) {
        return Err(Error::InvalidInput("arc range must be nonempty with count >= 1".into()));
    }
    let arcs = arc.samples();
    let pts = trace(domain, slice, arc.seed, &arcs)?;
    let mut samples = Vec::with_capacity(pts.len());
    for (&a, &s) in arcs.iter().zip(&pts) {
        let x = slice.embed(s);
        let kappa = slice_curvature(domain, slice, s)?;
        if kappa.abs() < 1e-9 {
            return Err(Error::ZeroCurvature(format!("curvature {kappa:e} at arc {a}")));
        }
        let v = normal_from_gradient(&domain.gradient(&x));
        let w = v.w(slice.j0);
        let wn = w.norm();
        if !(wn > 0.0) {
            return Err(Error::NotACurve(wn));
        }
        let v = v.scale(1.0 / wn);
        samples.push(DirectionSample {
            arc: a,
            slice_point: s,
            point: x,
            normal: v,
            w: v.w(slice.j0),
            curvature: kappa,
        });
    }
    if samples.len() > 1 {
        let mut sign = 0.0;
        for pair in samples.windows(2) {
            let d = pair[0].w.cross(pair[1].w).atan2(pair[0].w.dot(pair[1].w));
            if d.abs() < 1e-12 || (sign != 0.0 && d.signum() != sign) {
                return Err(Error::ZeroCurvature(format!(
                    "w angle not strictly monotone near arc {}",
                    pair[1].arc
                )));
            }
            sign = d.signum();
        }
    }
    let a_star = enclosing_ball(&samples.iter().map(|s| s.normal.to_array()).collect::<Vec<_>>());
    Ok(DirectionField { samples, a_star })
}

/// Approximate minimal enclosing ball (Badoiu-Clarkson iteration),
/// radius taken as the exact maximum distance to the final centre.
fn enclosing_ball(pts: &[[f64; 6]]) -> EnclosingBall {
    let dist = |a: &[f64; 6], b: &[f64; 6]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut c = pts[0];
    for it in 1..=1000 {
        let far = pts
            .iter()
            .max_by(|a, b| dist(a, &c).total_cmp(&dist(b, &c)))
            .expect("nonempty");
        let k = 1.0 / (it as f64 + 1.0);
        for i in 0..6 {
            c[i] += (far[i] - c[i]) * k;
        }
    }
    let radius = pts.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
    EnclosingBall { center: c, radius }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvatures() {
        let ball = LevelSetDomain::ball();
        let sl = SliceSpec::new(1, Vec2::ZERO).unwrap();
        let k = slice_curvature(&ball, &sl, Vec2::from_angle(0.4)).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        let sl = SliceSpec::new(1, Vec2::new(0.6, 0.0)).unwrap();
        let k = slice_curvature(&ball, &sl, Vec2::from_angle(1.1) * 0.8).unwrap();
        assert!((k - 1.25).abs() < 1e-12);
        for j0 in 2..=3 {
            let sl = SliceSpec::new(j0, Vec2::ZERO).unwrap();
            let s = if j0 == 2 {
                Vec2::new(0.0, 1.0)
            } else {
                Vec2::new(0.0, 1.0 / 2f64.sqrt())
            };
            assert!(slice_curvature(&ball, &sl, s).unwrap() > 0.0);
        }
    }

    #[test]
    fn paraboloid_slices_are_flat() {
        let d = LevelSetDomain::paraboloid_d1();
        let cases = [
            (1, Vec2::new(0.3, -0.2), Vec2::new(0.5, 0.3 * 0.5 + 0.09)),
            (2, Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.7)),
            (3, Vec2::new(0.2, 0.1), Vec2::new(0.4, 0.0)),
        ];
        for (j0, fp, seed) in cases {
            let sl = SliceSpec::new(j0, fp).unwrap();
            let s = project(&d, &sl, seed).unwrap();
            assert!(slice_curvature(&d, &sl, s).unwrap().abs() < 1e-12, "j0 = {j0}");
        }
    }

    #[test]
    fn ball_field_is_circle_normal() {
        let sl = SliceSpec::new(1, Vec2::ZERO).unwrap();
        let arc = ArcSpec {
            seed: Vec2::new(0.0, 1.0),
            range: (-0.2, 0.2),
            count: 8,
        };
        let f = direction_field(&LevelSetDomain::ball(), &sl, &arc).unwrap();
        for s in &f.samples {
            let expect = std::f64::consts::FRAC_PI_2 + s.arc;
            assert!((s.w.angle() - expect).abs() < 1e-9, "{} vs {}", s.w.angle(), expect);
            assert!((s.w - s.slice_point).norm() < 1e-9);
            assert_eq!([s.point[0], s.point[1]], [0.0, 0.0]);
            assert!((s.w.norm() - 1.0).abs() < 1e-14);
            let v = s.normal;
            assert!((v.v1 + v.v2 + v.v3).norm() < 1e-14);
        }
        for p in f.samples.iter().map(|s| s.normal.to_array()) {
            let d: f64 = p
                .iter()
                .zip(&f.a_star.center)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(d <= f.a_star.radius + 1e-12);
        }
    }

    #[test]
    fn long_arc_lengths() {
        let sl = SliceSpec::new(1, Vec2::new(0.6, 0.0)).unwrap();
        let arc = ArcSpec {
            seed: Vec2::new(0.0, 1.0),
            range: (-1.0, 1.0),
            count: 4,
        };
        let f = direction_field(&LevelSetDomain::ball(), &sl, &arc).unwrap();
        for s in &f.samples {
            let angle = std::f64::consts::FRAC_PI_2 + s.arc / 0.8;
            assert!((s.slice_point - Vec2::from_angle(angle) * 0.8).norm() < 1e-9);
        }
    }

    #[test]
    fn cylinder_is_flat() {
        let sl = SliceSpec::new(1, Vec2::new(0.5, 0.0)).unwrap();
        let arc = ArcSpec {
            seed: Vec2::new(0.8, 0.0),
            range: (-0.2, 0.2),
            count: 8,
        };
        let r = direction_field(&LevelSetDomain::cylinder_disc(), &sl, &arc);
        assert!(matches!(r, Err(Error::ZeroCurvature(_))), "{r:?}");
    }
}
