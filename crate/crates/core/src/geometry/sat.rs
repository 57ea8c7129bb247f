use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, OrientedRect, Vec2};

/// Outcome of [`pairwise_disjoint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disjointness {
    pub disjoint: bool,
    /// Lexicographically smallest overlapping pair.
    pub first_violation: Option<(usize, usize)>,
}

/// Separating-axis test for overlapping interiors. Touching boundaries
/// (overlap depth at most `tol` along some axis) count as disjoint.
pub fn polygons_overlap(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    for poly in [a, b] {
        let v = poly.vertices();
        for i in 0..v.len() {
            let e = v[(i + 1) % v.len()] - v[i];
            let Some(axis) = e.perp().normalized() else { continue };
            let (a0, a1) = project(a.vertices(), axis);
            let (b0, b1) = project(b.vertices(), axis);
            if a1 - b0 <= tol || b1 - a0 <= tol {
                return false;
            }
        }
    }
    true
}

fn project(v: &[Vec2], axis: Vec2) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let s = p.dot(axis);
        (lo.min(s), hi.max(s))
    })
}

/// Checks that all rectangle interiors are pairwise disjoint.
pub fn pairwise_disjoint(rects: &[OrientedRect]) -> Disjointness {
    let polys: Vec<ConvexPolygon> = rects.iter().map(|r| r.to_polygon()).collect();
    let boxes: Vec<_> = rects.iter().map(|r| r.aabb()).collect();
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&i, &j| boxes[i].min.x.total_cmp(&boxes[j].min.x).then(i.cmp(&j)));
    let tol = 1e-12;
    let mut first: Option<(usize, usize)> = None;
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j].min.x >= boxes[i].max.x {
                break;
            }
            if !boxes[i].overlaps(&boxes[j]) {
                continue;
            }
            if polygons_overlap(&polys[i], &polys[j], tol) {
                let pair = (i.min(j), i.max(j));
                if first.is_none_or(|f| pair < f) {
                    first = Some(pair);
                }
            }
        }
    }
    Disjointness {
        disjoint: first.is_none(),
        first_violation: first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_rects_overlap() {
        let r = OrientedRect::from_start(Vec2::ZERO, Vec2::from_angle(0.4), 1.0, 0.1);
        let d = pairwise_disjoint(&[r, r]);
        assert!(!d.disjoint);
        assert_eq!(d.first_violation, Some((0, 1)));
    }

    #[test]
    fn far_translates_disjoint() {
        let r = OrientedRect::from_start(Vec2::ZERO, Vec2::from_angle(0.4), 1.0, 0.1);
        let d = pairwise_disjoint(&[r, r.translate(Vec2::new(3.0, -2.0)), r.translate(Vec2::new(0.0, 2.0))]);
        assert!(d.disjoint);
    }

    #[test]
    fn edge_contact_is_disjoint() {
        let r = OrientedRect::from_start(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 0.25);
        assert!(pairwise_disjoint(&[r, r.translate(Vec2::new(0.0, 0.25))]).disjoint);
        assert!(!pairwise_disjoint(&[r, r.translate(Vec2::new(0.0, 0.2))]).disjoint);
    }
}
