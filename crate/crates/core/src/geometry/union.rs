use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Aabb, ConvexPolygon, Vec2};
use crate::error::{Error, Result};

/// A measured quantity with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub err_bound: f64,
}

/// Algorithm behind [`union_measure_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum UnionEngine {
    /// Boundary integral over the uncovered part of every edge.
    #[default]
    Exact,
    /// Uniform grid with inside/outside/boundary cell classification,
    /// refined by doubling until the boundary area is below `tol`.
    Raster { max_cells: u64 },
}

/// Measures of the level sets `{x : count(x) = m}` for `m >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapDistribution {
    pub measures: BTreeMap<usize, f64>,
    pub err_bound: f64,
}

impl OverlapDistribution {
    pub fn union(&self) -> f64 {
        self.measures.values().sum()
    }

    /// `sum_m measure(m) * m^q`.
    pub fn lp_integral(&self, q: f64) -> f64 {
        self.measures.iter().map(|(&m, &a)| a * (m as f64).powf(q)).sum()
    }
}

pub fn union_measure(polys: &[ConvexPolygon], tol: f64) -> Result<Measured> {
    union_measure_with(polys, tol, UnionEngine::Exact)
}

pub fn union_measure_with(polys: &[ConvexPolygon], tol: f64, engine: UnionEngine) -> Result<Measured> {
    check_tol(tol)?;
    match engine {
        UnionEngine::Exact => {
            let d = overlap_distribution(polys, tol)?;
            Ok(Measured {
                value: d.union(),
                err_bound: d.err_bound,
            })
        }
        UnionEngine::Raster { max_cells } => raster_union(polys, tol, max_cells),
    }
}

/// Exact level-set measures of the covering count.
///
/// Uses `area{count >= m} = sum of x dy` over the boundary pieces of that set.
/// Every piece of an input edge covered by exactly `c` other polygons lies on
/// the boundary of `{count >= c + 1}`. Collinear overlapping edges with the
/// same outward normal count as covered only by lower-indexed polygons.
pub fn overlap_distribution(polys: &[ConvexPolygon], tol: f64) -> Result<OverlapDistribution> {
    check_tol(tol)?;
    let polys: Vec<&ConvexPolygon> = polys.iter().filter(|p| !p.is_empty()).collect();
    if polys.is_empty() {
        return Ok(OverlapDistribution {
            measures: BTreeMap::new(),
            err_bound: 0.0,
        });
    }
    let boxes: Vec<Aabb> = polys.iter().map(|p| p.aabb().expect("nonempty")).collect();
    let all = boxes.iter().skip(1).fold(boxes[0], |a, b| a.union(*b));
    let origin = all.center();
    let scale = all.diameter().max(1.0);
    let planes: Vec<Vec<(Vec2, f64)>> = polys.iter().map(|p| p.translate(-origin).halfplanes()).collect();

    let per_poly: Vec<(Vec<f64>, f64)> = (0..polys.len())
        .into_par_iter()
        .map(|i| edge_contributions(i, &polys, &boxes, &planes, origin, scale))
        .collect();

    let mut levels: Vec<f64> = Vec::new();
    let mut abs_sum = 0.0;
    for (lv, a) in &per_poly {
        if levels.len() < lv.len() {
            levels.resize(lv.len(), 0.0);
        }
        for (k, x) in lv.iter().enumerate() {
            levels[k] += x;
        }
        abs_sum += a;
    }
    // levels[m] = area{count >= m}; m = 0 unused.
    let mut measures = BTreeMap::new();
    for m in 1..levels.len() {
        let next = levels.get(m + 1).copied().unwrap_or(0.0);
        let v = (levels[m] - next).max(0.0);
        if v > 0.0 {
            measures.insert(m, v);
        }
    }
    let total: f64 = polys.iter().map(|p| p.area()).sum();
    let err_bound = 64.0 * f64::EPSILON * (abs_sum + total) + 1e-13 * total;
    if err_bound > tol {
        return Err(Error::TolUnachievable {
            tol,
            achieved: err_bound,
        });
    }
    Ok(OverlapDistribution { measures, err_bound })
}

pub fn count_lp_integral(polys: &[ConvexPolygon], q: f64, tol: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidInput(format!("exponent q = {q} must be positive")));
    }
    Ok(overlap_distribution(polys, tol)?.lp_integral(q))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance {tol} must be positive")))
    }
}

/// Per-level `x dy` sums of polygon `i`'s edges, plus the sum of magnitudes.
fn edge_contributions(
    i: usize,
    polys: &[&ConvexPolygon],
    boxes: &[Aabb],
    planes: &[Vec<(Vec2, f64)>],
    origin: Vec2,
    scale: f64,
) -> (Vec<f64>, f64) {
    let tau = 1e-12 * scale;
    let verts: Vec<Vec2> = polys[i].vertices().iter().map(|&v| v - origin).collect();
    let near: Vec<usize> = (0..polys.len())
        .filter(|&j| j != i && boxes[j].overlaps(&boxes[i]))
        .collect();
    let mut levels = vec![0.0; 2];
    let mut abs_sum = 0.0;
    let mut events: Vec<(f64, i32)> = Vec::new();
    let m = verts.len();
    for e in 0..m {
        let p = verts[e];
        let q = verts[(e + 1) % m];
        let d = q - p;
        events.clear();
        for &j in &near {
            if let Some((lo, hi)) = covered_interval(p, q, &planes[j], j < i, tau) {
                events.push((lo, 1));
                events.push((hi, -1));
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut count = 0i32;
        let mut s_prev = 0.0;
        let mut push = |s0: f64, s1: f64, c: i32, levels: &mut Vec<f64>| {
            if s1 <= s0 {
                return;
            }
            let x0 = p.x + d.x * s0;
            let x1 = p.x + d.x * s1;
            let v = 0.5 * (x0 + x1) * d.y * (s1 - s0);
            let lvl = (c + 1) as usize;
            if levels.len() <= lvl {
                levels.resize(lvl + 1, 0.0);
            }
            levels[lvl] += v;
            abs_sum += v.abs();
        };
        for &(s, delta) in &events {
            push(s_prev, s, count, &mut levels);
            s_prev = s_prev.max(s);
            count += delta;
        }
        push(s_prev, 1.0, count, &mut levels);
    }
    (levels, abs_sum)
}

/// Parameter interval of segment `p -> q` lying inside the polygon given by
/// `planes`, under the collinear tie rule.
fn covered_interval(p: Vec2, q: Vec2, planes: &[(Vec2, f64)], lower: bool, tau: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = q - p;
    for &(n, c) in planes {
        let f0 = n.dot(p) - c;
        let f1 = n.dot(q) - c;
        if f0.abs() <= tau && f1.abs() <= tau {
            // Collinear: same outward normal iff the edge runs the same way.
            let same = n.dot(Vec2::new(d.y, -d.x)) > 0.0;
            if same && lower {
                continue;
            }
            return None;
        }
        if f0 <= 0.0 && f1 <= 0.0 {
            continue;
        }
        if f0 > 0.0 && f1 > 0.0 {
            return None;
        }
        let s = f0 / (f0 - f1);
        if f0 > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        if hi <= lo {
            return None;
        }
    }
    Some((lo, hi))
}

#[derive(Clone, Copy, PartialEq)]
enum Cell {
    Inside,
    Outside,
    Partial,
}

fn classify_cell(cell: &Aabb, corners: &[Vec2; 4], planes: &[(Vec2, f64)]) -> Cell {
    let mut all_in = true;
    for &(n, c) in planes {
        let mut n_in = 0;
        for &v in corners {
            if n.dot(v) <= c {
                n_in += 1;
            }
        }
        if n_in == 0 {
            return Cell::Outside;
        }
        if n_in < 4 {
            all_in = false;
        }
    }
    let _ = cell;
    if all_in {
        Cell::Inside
    } else {
        Cell::Partial
    }
}

fn raster_union(polys: &[ConvexPolygon], tol: f64, max_cells: u64) -> Result<Measured> {
    let polys: Vec<&ConvexPolygon> = polys.iter().filter(|p| !p.is_empty()).collect();
    if polys.is_empty() {
        return Ok(Measured {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    let boxes: Vec<Aabb> = polys.iter().map(|p| p.aabb().expect("nonempty")).collect();
    let all = boxes.iter().skip(1).fold(boxes[0], |a, b| a.union(*b));
    let planes: Vec<Vec<(Vec2, f64)>> = polys.iter().map(|p| p.halfplanes()).collect();
    let mut n: u64 = 64;
    let mut best = f64::INFINITY;
    while n * n <= max_cells {
        let (inside, boundary) = raster_pass(&all, n as usize, &boxes, &planes);
        best = best.min(boundary);
        if boundary <= tol {
            return Ok(Measured {
                value: inside + 0.5 * boundary,
                err_bound: boundary,
            });
        }
        n *= 2;
    }
    Err(Error::TolUnachievable { tol, achieved: best })
}

/// Returns (inside area, boundary-cell area) on an `n x n` grid.
fn raster_pass(all: &Aabb, n: usize, boxes: &[Aabb], planes: &[Vec<(Vec2, f64)>]) -> (f64, f64) {
    let hx = all.width().max(1e-300) / n as f64;
    let hy = all.height().max(1e-300) / n as f64;
    let rows: Vec<(u64, u64)> = (0..n)
        .into_par_iter()
        .map(|r| {
            let y0 = all.min.y + r as f64 * hy;
            let strip = Aabb::new(Vec2::new(all.min.x, y0), Vec2::new(all.max.x, y0 + hy));
            let live: Vec<usize> = (0..boxes.len()).filter(|&k| boxes[k].overlaps(&strip)).collect();
            let (mut inside, mut boundary) = (0u64, 0u64);
            for c in 0..n {
                let x0 = all.min.x + c as f64 * hx;
                let cell = Aabb::new(Vec2::new(x0, y0), Vec2::new(x0 + hx, y0 + hy));
                let corners = [
                    cell.min,
                    Vec2::new(cell.max.x, cell.min.y),
                    cell.max,
                    Vec2::new(cell.min.x, cell.max.y),
                ];
                let mut partial = false;
                let mut hit = false;
                for &k in &live {
                    if !boxes[k].overlaps(&cell) {
                        continue;
                    }
                    match classify_cell(&cell, &corners, &planes[k]) {
                        Cell::Inside => {
                            hit = true;
                            break;
                        }
                        Cell::Partial => partial = true,
                        Cell::Outside => {}
                    }
                }
                if hit {
                    inside += 1;
                } else if partial {
                    boundary += 1;
                }
            }
            (inside, boundary)
        })
        .collect();
    let cell = hx * hy;
    let (i, b) = rows.iter().fold((0u64, 0u64), |a, r| (a.0 + r.0, a.1 + r.1));
    (i as f64 * cell, b as f64 * cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OrientedRect;
    use proptest::prelude::*;

    fn sq(x: f64, y: f64) -> ConvexPolygon {
        Aabb::new(Vec2::new(x, y), Vec2::new(x + 1.0, y + 1.0)).to_polygon()
    }

    #[test]
    fn additivity_and_idempotence() {
        let m = union_measure(&[sq(0.0, 0.0), sq(3.0, 0.0)], 1e-9).unwrap();
        assert!((m.value - 2.0).abs() <= 1e-9);
        let m = union_measure(&[sq(0.0, 0.0), sq(0.0, 0.0)], 1e-9).unwrap();
        assert!((m.value - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn distributions() {
        let d = overlap_distribution(&[sq(0.0, 0.0), sq(0.0, 0.0)], 1e-9).unwrap();
        assert_eq!(d.measures.len(), 1);
        assert!((d.measures[&2] - 1.0).abs() < 1e-12);
        let d = overlap_distribution(&[sq(0.0, 0.0), sq(0.5, 0.0)], 1e-9).unwrap();
        assert!((d.measures[&1] - 1.0).abs() < 1e-12);
        assert!((d.measures[&2] - 0.5).abs() < 1e-12);
        let rects: Vec<_> = (0..8)
            .map(|k| sq(2.0 * k as f64, 0.0).scale_about_origin(0.5))
            .collect();
        let d = overlap_distribution(&rects, 1e-9).unwrap();
        assert_eq!(d.measures.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert!((d.measures[&1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lp_integrals() {
        assert!((count_lp_integral(&[sq(0.0, 0.0)], 7.0, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((count_lp_integral(&[sq(0.0, 0.0), sq(0.0, 0.0)], 2.0, 1e-9).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_shared_edges() {
        // Three copies of the same square plus one sharing an edge.
        let d = overlap_distribution(&[sq(0.0, 0.0), sq(0.0, 0.0), sq(0.0, 0.0), sq(1.0, 0.0)], 1e-9).unwrap();
        assert!((d.measures[&3] - 1.0).abs() < 1e-12);
        assert!((d.measures[&1] - 1.0).abs() < 1e-12);
        assert!(!d.measures.contains_key(&2));
    }

    #[test]
    fn raster_brackets_exact() {
        let r = [
            OrientedRect::from_start(Vec2::ZERO, Vec2::from_angle(0.2), 1.0, 0.3).to_polygon(),
            OrientedRect::from_start(Vec2::new(0.1, 0.0), Vec2::from_angle(-0.3), 1.0, 0.3).to_polygon(),
        ];
        let exact = union_measure(&r, 1e-9).unwrap();
        let ras = union_measure_with(&r, 2e-2, UnionEngine::Raster { max_cells: 1 << 22 }).unwrap();
        assert!((exact.value - ras.value).abs() <= ras.err_bound);
        assert!(matches!(
            union_measure_with(&r, 1e-9, UnionEngine::Raster { max_cells: 1 << 16 }),
            Err(Error::TolUnachievable { .. })
        ));
    }

    fn arb_rects() -> impl Strategy<Value = Vec<ConvexPolygon>> {
        prop::collection::vec(
            (-1.0..1.0f64, -1.0..1.0f64, 0.0..3.2f64, 0.2..1.5f64, 0.05..0.8f64),
            1..7,
        )
        .prop_map(|v| {
            v.into_iter()
                .map(|(x, y, a, l, w)| {
                    OrientedRect::from_start(Vec2::new(x, y), Vec2::from_angle(a), l, w).to_polygon()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn mass_balance_and_bounds(polys in arb_rects()) {
            let d = overlap_distribution(&polys, 1e-9).unwrap();
            let total: f64 = polys.iter().map(|p| p.area()).sum();
            let max = polys.iter().map(|p| p.area()).fold(0.0, f64::max);
            prop_assert!((d.lp_integral(1.0) - total).abs() < 1e-9);
            prop_assert!(d.union() <= total + 1e-9);
            prop_assert!(d.union() >= max - 1e-9);
            prop_assert!(d.measures.values().all(|&m| m >= 0.0));
        }

        #[test]
        fn translation_invariant(polys in arb_rects(), dx in -100.0..100.0f64, dy in -100.0..100.0f64) {
            let a = union_measure(&polys, 1e-9).unwrap();
            let moved: Vec<_> = polys.iter().map(|p| p.translate(Vec2::new(dx, dy))).collect();
            let b = union_measure(&moved, 1e-9).unwrap();
            prop_assert!((a.value - b.value).abs() <= 1e-9);
        }

        #[test]
        fn pair_inclusion_exclusion(polys in arb_rects()) {
            let a = &polys[0];
            let b = &polys[polys.len() - 1];
            if polys.len() > 1 {
                let u = union_measure(&[a.clone(), b.clone()], 1e-9).unwrap().value;
                let i = super::super::intersect_convex(a, b).area();
                prop_assert!((u - (a.area() + b.area() - i)).abs() < 1e-9);
            }
        }
    }
}
