//! Perron-tree rectangle families: `N` rectangles of size `1 x 1/N` with
//! small union and pairwise disjoint reaches `R_n - 2 v_n`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_8, PI};

use crate::error::{Error, Result};
use crate::geometry::{pairwise_disjoint, union_measure, Aabb, ConvexPolygon, Measured, OrientedRect, Vec2};

/// Tolerance for the union measure recorded as `achieved_eps`.
pub const EPS_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronParams {
    /// `N = 2^depth`.
    pub depth: u32,
    /// Angle of the central direction.
    pub base_angle: f64,
    /// Directions fill `[base_angle - half_aperture, base_angle + half_aperture]`.
    pub half_aperture: f64,
    /// Span of the merge schedule: stage `j` of `k` makes the two sibling
    /// groups' mean lines cross at `overlap_parameter * j / k` along the
    /// rectangles.
    pub overlap_parameter: f64,
}

impl Default for PerronParams {
    fn default() -> Self {
        PerronParams {
            depth: 6,
            base_angle: 0.0,
            half_aperture: 0.39,
            overlap_parameter: 0.65,
        }
    }
}

impl PerronParams {
    pub fn validate(&self) -> Result<()> {
        if self.depth > 16 {
            return Err(Error::InvalidInput(format!("depth {} exceeds 16", self.depth)));
        }
        if !(self.half_aperture > 0.0 && self.half_aperture <= FRAC_PI_8 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "half_aperture {} outside (0, pi/8]",
                self.half_aperture
            )));
        }
        if !(self.overlap_parameter > 0.0 && self.overlap_parameter < 1.0) {
            return Err(Error::InvalidInput(format!(
                "overlap_parameter {} outside (0, 1)",
                self.overlap_parameter
            )));
        }
        if !self.base_angle.is_finite() {
            return Err(Error::InvalidInput("base_angle must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesicovitchFamily {
    pub depth: u32,
    pub rects: Vec<OrientedRect>,
    pub reaches: Vec<OrientedRect>,
    pub directions: Vec<Vec2>,
    pub k_star: Aabb,
    pub achieved_eps: Measured,
    pub base_angle: f64,
    pub half_aperture: f64,
}

impl BesicovitchFamily {
    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Angular gap between neighbouring construction directions.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_aperture / self.len().max(1) as f64
    }

    pub fn rect_polygons(&self) -> Vec<ConvexPolygon> {
        self.rects.iter().map(|r| r.to_polygon()).collect()
    }

    pub fn reach_polygons(&self) -> Vec<ConvexPolygon> {
        self.reaches.iter().map(|r| r.to_polygon()).collect()
    }

    /// Serializable view with explicit vertices.
    pub fn document(&self) -> FamilyDocument {
        let corners = |r: &OrientedRect| r.corners().iter().map(|v| [v.x, v.y]).collect();
        FamilyDocument {
            n: self.len(),
            depth: self.depth,
            base_angle: self.base_angle,
            half_aperture: self.half_aperture,
            k_star: [
                self.k_star.min.x,
                self.k_star.min.y,
                self.k_star.max.x,
                self.k_star.max.y,
            ],
            achieved_eps: self.achieved_eps.value,
            achieved_eps_err: self.achieved_eps.err_bound,
            directions: self.directions.iter().map(|d| [d.x, d.y]).collect(),
            rects: self.rects.iter().map(corners).collect(),
            reaches: self.reaches.iter().map(corners).collect(),
            family: self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub n: usize,
    pub depth: u32,
    pub base_angle: f64,
    pub half_aperture: f64,
    pub k_star: [f64; 4],
    pub achieved_eps: f64,
    pub achieved_eps_err: f64,
    pub directions: Vec<[f64; 2]>,
    pub rects: Vec<Vec<[f64; 2]>>,
    pub reaches: Vec<Vec<[f64; 2]>>,
    pub family: BesicovitchFamily,
}

/// The fixed compact set containing every family.
pub fn k_star() -> Aabb {
    Aabb::new(Vec2::new(-4.0, -4.0), Vec2::new(4.0, 4.0))
}

/// Builds the family by the graded Perron merge.
///
/// Directions are uniform in angle. Working in a frame whose `+x` axis points
/// from the rectangles toward their reaches, rectangle `n` starts on `x = 0`
/// at height `y_n`. Stage `j` shifts the upper half of every sibling pair of
/// groups so that the mean lines of the two halves meet at `x = lambda j / k`.
pub fn build_perron_family(params: PerronParams) -> Result<BesicovitchFamily> {
    params.validate()?;
    let k = params.depth;
    let n = 1usize << k;
    let theta0 = params.half_aperture;
    let phis: Vec<f64> = (0..n)
        .map(|i| -theta0 + (i as f64 + 0.5) * 2.0 * theta0 / n as f64)
        .collect();
    let tans: Vec<f64> = phis.iter().map(|p| p.tan()).collect();
    let mut ys = vec![0.0; n];
    for j in 1..=k {
        let x_j = params.overlap_parameter * j as f64 / k as f64;
        let g = n >> j;
        for start in (0..n).step_by(2 * g) {
            let lower: f64 = tans[start..start + g].iter().sum::<f64>() / g as f64;
            let upper: f64 = tans[start + g..start + 2 * g].iter().sum::<f64>() / g as f64;
            for y in &mut ys[start + g..start + 2 * g] {
                *y -= x_j * (upper - lower);
            }
        }
    }
    let y_mid =
        0.5 * (ys.iter().cloned().fold(f64::INFINITY, f64::min) + ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let frame = params.base_angle + PI;
    let width = 1.0 / n as f64;
    let mut rects = Vec::with_capacity(n);
    let mut directions = Vec::with_capacity(n);
    for i in 0..n {
        let start = Vec2::new(-0.5, ys[i] - y_mid).rotate(frame);
        let v = Vec2::from_angle(params.base_angle + phis[i]);
        rects.push(OrientedRect::from_start(start, -v, 1.0, width));
        directions.push(v);
    }
    finish(k, rects, directions, params.base_angle, theta0)
}

fn finish(
    depth: u32,
    rects: Vec<OrientedRect>,
    directions: Vec<Vec2>,
    base_angle: f64,
    half_aperture: f64,
) -> Result<BesicovitchFamily> {
    let reaches: Vec<OrientedRect> = rects
        .iter()
        .zip(&directions)
        .map(|(r, &v)| r.translate(v * -2.0))
        .collect();
    let d = pairwise_disjoint(&reaches);
    if let Some(pair) = d.first_violation {
        return Err(Error::ConstructionFailure { depth, pair });
    }
    let polys: Vec<ConvexPolygon> = rects.iter().map(|r| r.to_polygon()).collect();
    let achieved_eps = union_measure(&polys, EPS_TOL)?;
    Ok(BesicovitchFamily {
        depth,
        rects,
        reaches,
        directions,
        k_star: k_star(),
        achieved_eps,
        base_angle,
        half_aperture,
    })
}

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Re-aims the family so that rectangle `n` is parallel to `wanted[n]`.
///
/// Family and wanted directions are paired by rank of angle (ties by index);
/// each rectangle is rotated about its centre. Reach disjointness and the
/// union measure are recomputed.
pub fn assign_directions(family: &BesicovitchFamily, wanted: &[Vec2]) -> Result<BesicovitchFamily> {
    let n = family.len();
    if wanted.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} wanted directions for a family of {n}",
            wanted.len()
        )));
    }
    if let Some(i) = wanted.iter().position(|w| (w.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidInput(format!(
            "wanted direction {i} is not a unit vector"
        )));
    }
    let rel = |v: &Vec2| wrap(v.angle() - family.base_angle);
    let have: Vec<f64> = family.directions.iter().map(rel).collect();
    let want: Vec<f64> = wanted.iter().map(rel).collect();
    let spacing = family.spacing();
    for (i, &a) in want.iter().enumerate() {
        let dev = have.iter().map(|&h| (a - h).abs()).fold(f64::INFINITY, f64::min);
        if dev > spacing {
            return Err(Error::DirectionMismatch {
                index: i,
                deviation: dev,
                spacing,
            });
        }
    }
    let mut have_order: Vec<usize> = (0..n).collect();
    have_order.sort_by(|&i, &j| have[i].total_cmp(&have[j]).then(i.cmp(&j)));
    let mut want_order: Vec<usize> = (0..n).collect();
    want_order.sort_by(|&i, &j| want[i].total_cmp(&want[j]).then(i.cmp(&j)));

    let mut rects = vec![family.rects[0]; n];
    for (&f, &w) in have_order.iter().zip(&want_order) {
        let delta = want[w] - have[f];
        let r = family.rects[f];
        let rotated = if delta == 0.0 {
            r
        } else {
            r.rotate_about(r.center, delta)
        };
        rects[w] = OrientedRect {
            direction: -wanted[w],
            ..rotated
        };
    }
    finish(
        family.depth,
        rects,
        wanted.to_vec(),
        family.base_angle,
        family.half_aperture,
    )
}

/// The four checks of a Besicovitch family plus the measured quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub dimensions_ok: bool,
    pub measure_ok: bool,
    pub reaches_disjoint: bool,
    pub contained: bool,
    pub union_measure: f64,
    pub union_err: f64,
    pub max_dimension_error: f64,
    pub first_overlap: Option<(usize, usize)>,
}

impl FamilyReport {
    pub fn all_ok(&self) -> bool {
        self.dimensions_ok && self.measure_ok && self.reaches_disjoint && self.contained
    }
}

pub fn verify_family(family: &BesicovitchFamily, eps_target: f64) -> FamilyReport {
    let n = family.len();
    let consistent = family.reaches.len() == n && family.directions.len() == n && n > 0;
    let mut max_err: f64 = if consistent { 0.0 } else { f64::INFINITY };
    if consistent {
        let w = 1.0 / n as f64;
        for ((r, reach), v) in family.rects.iter().zip(&family.reaches).zip(&family.directions) {
            max_err = max_err
                .max((r.length - 1.0).abs())
                .max((r.width - w).abs())
                .max((v.norm() - 1.0).abs())
                .max(r.direction.cross(*v).abs())
                .max((reach.center - (r.center - *v * 2.0)).norm())
                .max(reach.direction.cross(r.direction).abs())
                .max((reach.length - r.length).abs() + (reach.width - r.width).abs());
        }
    }
    let polys = family.rect_polygons();
    let (union, err) = match union_measure(&polys, EPS_TOL) {
        Ok(m) => (m.value, m.err_bound),
        Err(_) => (f64::NAN, f64::INFINITY),
    };
    let disj = pairwise_disjoint(&family.reaches);
    let contained = family
        .rects
        .iter()
        .all(|r| r.corners().iter().all(|&c| family.k_star.contains(c)));
    FamilyReport {
        dimensions_ok: max_err <= 1e-12,
        measure_ok: union + err < eps_target,
        reaches_disjoint: disj.disjoint,
        contained,
        union_measure: union,
        union_err: err,
        max_dimension_error: max_err,
        first_overlap: disj.first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(depth: u32) -> PerronParams {
        PerronParams {
            depth,
            ..PerronParams::default()
        }
    }

    #[test]
    fn depth_zero_is_unit_square() {
        let f = build_perron_family(params(0)).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f.achieved_eps.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn total_area_is_one_and_inside_k_star() {
        for d in [1, 3, 6] {
            let f = build_perron_family(params(d)).unwrap();
            let total: f64 = f.rects.iter().map(|r| r.area()).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let big = f.k_star.expand(2.0);
            assert!(f.reaches.iter().all(|r| r.corners().iter().all(|&c| big.contains(c))));
            let report = verify_family(&f, 1.1);
            assert!(report.all_ok(), "{report:?}");
        }
    }

    #[test]
    fn directions_in_interval() {
        let p = PerronParams {
            base_angle: 1.0,
            ..params(5)
        };
        let f = build_perron_family(p).unwrap();
        for v in &f.directions {
            assert!((v.angle() - 1.0).abs() < p.half_aperture);
        }
    }

    #[test]
    fn two_identical_rects_fail_disjointness() {
        let mut f = build_perron_family(params(1)).unwrap();
        f.rects[1] = f.rects[0];
        f.reaches[1] = f.reaches[0];
        f.directions[1] = f.directions[0];
        let r = verify_family(&f, 2.0);
        assert!(!r.reaches_disjoint);
        assert_eq!(r.first_overlap, Some((0, 1)));
    }

    #[test]
    fn zero_target_fails_measure() {
        let f = build_perron_family(params(2)).unwrap();
        assert!(!verify_family(&f, 0.0).measure_ok);
    }

    #[test]
    fn identity_and_reversal() {
        let f = build_perron_family(params(4)).unwrap();
        let same = assign_directions(&f, &f.directions).unwrap();
        assert_eq!(same.rects, f.rects);
        let rev: Vec<Vec2> = f.directions.iter().rev().copied().collect();
        let g = assign_directions(&f, &rev).unwrap();
        let n = f.len();
        for i in 0..n {
            assert_eq!(g.rects[i], f.rects[n - 1 - i]);
        }
        assert_eq!(g.achieved_eps, f.achieved_eps);
    }

    #[test]
    fn far_direction_is_mismatch() {
        let f = build_perron_family(params(3)).unwrap();
        let mut w = f.directions.clone();
        w[0] = Vec2::from_angle(2.0);
        assert!(matches!(
            assign_directions(&f, &w),
            Err(Error::DirectionMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn rotation_preserves_verification() {
        let a = build_perron_family(params(5)).unwrap();
        let b = build_perron_family(PerronParams {
            base_angle: 0.7,
            ..params(5)
        })
        .unwrap();
        assert!((a.achieved_eps.value - b.achieved_eps.value).abs() < 1e-9);
        assert_eq!(verify_family(&a, 0.9).all_ok(), verify_family(&b, 0.9).all_ok());
    }

    #[test]
    fn small_aperture_fails_construction() {
        let p = PerronParams {
            half_aperture: 0.05,
            ..params(6)
        };
        assert!(matches!(build_perron_family(p), Err(Error::ConstructionFailure { .. })));
    }
}
