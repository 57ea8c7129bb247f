//! Planar primitives: vectors, convex polygons, oriented rectangles,
//! convex clipping, union measures and disjointness tests.

mod sat;
mod union;

pub use sat::{pairwise_disjoint, polygons_overlap, Disjointness};
pub use union::{
    count_lp_integral, overlap_distribution, union_measure, union_measure_with, Measured, OverlapDistribution,
    UnionEngine,
};

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Orientation tolerance for clipping predicates.
pub const ORIENT_EPS: f64 = 1e-12;
/// Polygons thinner than this are normalized to empty.
pub const SLIVER_AREA: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from the x-axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Aabb { min, max }
    }

    pub fn square(center: Vec2, side: f64) -> Self {
        let h = Vec2::new(side / 2.0, side / 2.0);
        Aabb::new(center - h, center + h)
    }

    pub fn of_points(pts: impl IntoIterator<Item = Vec2>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut b = Aabb::new(first, first);
        for p in it {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn union(self, o: Aabb) -> Aabb {
        Aabb::new(
            Vec2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            Vec2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        )
    }

    /// Closed-box overlap test.
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn expand(self, by: f64) -> Aabb {
        let d = Vec2::new(by, by);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon::from_ccw_unchecked(vec![
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ])
    }
}

/// Convex polygon with counterclockwise vertices, or the empty polygon.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon { vertices: Vec::new() }
    }

    /// Validates convexity and counterclockwise order.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite polygon vertex".into()));
        }
        let raw = Self::from_ccw_unchecked(vertices);
        if raw.signed_area() < -SLIVER_AREA {
            return Err(Error::InvalidInput("polygon vertices are clockwise".into()));
        }
        let p = raw.normalized();
        let n = p.vertices.len();
        if n == 0 {
            return Ok(p);
        }
        let scale = p.scale();
        for i in 0..n {
            let a = p.vertices[i];
            let b = p.vertices[(i + 1) % n];
            let c = p.vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -ORIENT_EPS * scale * scale {
                return Err(Error::InvalidInput(format!(
                    "polygon not convex counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(p)
    }

    pub fn from_ccw_unchecked(vertices: Vec<Vec2>) -> Self {
        ConvexPolygon { vertices }
    }

    /// Regular `n`-gon inscribed in the circle of radius `r`.
    pub fn regular(center: Vec2, r: f64, n: usize) -> Self {
        let v = (0..n)
            .map(|k| center + Vec2::from_angle(std::f64::consts::TAU * k as f64 / n as f64) * r)
            .collect();
        ConvexPolygon { vertices: v }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let o = self.vertices[0];
        let mut s = 0.0;
        for i in 1..n - 1 {
            s += (self.vertices[i] - o).cross(self.vertices[i + 1] - o);
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().max(0.0)
    }

    pub fn aabb(&self) -> Option<Aabb> {
        Aabb::of_points(self.vertices.iter().copied())
    }

    pub fn translate(&self, d: Vec2) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
        }
    }

    pub fn scale_about_origin(&self, s: f64) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&v| v * s).collect(),
        }
    }

    /// Closed membership with orientation tolerance.
    pub fn contains(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let tol = ORIENT_EPS * self.scale().max(p.norm());
        (0..n).all(|i| {
            let a = self.vertices[i];
            let e = self.vertices[(i + 1) % n] - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    /// Keeps the part with `n.dot(x) <= c`.
    pub fn clip_halfplane(&self, n: Vec2, c: f64) -> Self {
        let m = self.vertices.len();
        if m == 0 {
            return Self::empty();
        }
        let tol = ORIENT_EPS * n.norm() * self.scale();
        let mut out = Vec::with_capacity(m + 1);
        for i in 0..m {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % m];
            let dp = n.dot(p) - c;
            let dq = n.dot(q) - c;
            if dp <= tol {
                out.push(p);
            }
            if (dp < -tol && dq > tol) || (dp > tol && dq < -tol) {
                let s = dp / (dp - dq);
                out.push(p + (q - p) * s);
            }
        }
        ConvexPolygon { vertices: out }.normalized()
    }

    /// Drops repeated vertices; slivers become empty.
    pub fn normalized(mut self) -> Self {
        let scale = self.scale();
        let tol = 1e-14 * scale;
        self.vertices.dedup_by(|b, a| (*b - *a).norm() <= tol);
        while self.vertices.len() > 1 && (self.vertices[0] - *self.vertices.last().unwrap()).norm() <= tol {
            self.vertices.pop();
        }
        if self.vertices.len() < 3 || self.signed_area() < SLIVER_AREA {
            self.vertices.clear();
        }
        self
    }

    /// Largest coordinate magnitude, at least 1.
    fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .fold(1.0f64, |m, v| m.max(v.x.abs()).max(v.y.abs()))
    }

    /// Outward half-planes `(n, c)` with `n.dot(x) <= c` inside; `n` unit.
    pub fn halfplanes(&self) -> Vec<(Vec2, f64)> {
        let m = self.vertices.len();
        (0..m)
            .filter_map(|i| {
                let a = self.vertices[i];
                let e = self.vertices[(i + 1) % m] - a;
                let n = Vec2::new(e.y, -e.x).normalized()?;
                Some((n, n.dot(a)))
            })
            .collect()
    }
}

/// Intersection of two convex polygons by half-plane clipping.
pub fn intersect_convex(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon::empty();
    }
    if let (Some(a), Some(b)) = (p.aabb(), q.aabb()) {
        if !a.overlaps(&b) {
            return ConvexPolygon::empty();
        }
    }
    let mut out = p.clone();
    for (n, c) in q.halfplanes() {
        out = out.clip_halfplane(n, c);
        if out.is_empty() {
            break;
        }
    }
    out
}

/// Rectangle given by center, unit long-side direction, length and width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub center: Vec2,
    pub direction: Vec2,
    pub length: f64,
    pub width: f64,
}

impl OrientedRect {
    pub fn new(center: Vec2, direction: Vec2, length: f64, width: f64) -> Result<Self> {
        if !center.is_finite() || !(length > 0.0) || !(width > 0.0) {
            return Err(Error::InvalidInput(
                "rectangle needs finite center, positive sides".into(),
            ));
        }
        if ((direction.norm() - 1.0).abs()) > 1e-12 {
            return Err(Error::InvalidInput("rectangle direction must be a unit vector".into()));
        }
        Ok(OrientedRect {
            center,
            direction,
            length,
            width,
        })
    }

    /// Rectangle whose long side runs from `start` along `direction`.
    pub fn from_start(start: Vec2, direction: Vec2, length: f64, width: f64) -> Self {
        OrientedRect {
            center: start + direction * (length / 2.0),
            direction,
            length,
            width,
        }
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// Vertices counterclockwise starting at the back-right corner.
    pub fn corners(&self) -> [Vec2; 4] {
        let l = self.direction * (self.length / 2.0);
        let w = self.direction.perp() * (self.width / 2.0);
        let c = self.center;
        [c - l - w, c + l - w, c + l + w, c - l + w]
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon::from_ccw_unchecked(self.corners().to_vec())
    }

    pub fn translate(&self, d: Vec2) -> Self {
        OrientedRect {
            center: self.center + d,
            ..*self
        }
    }

    pub fn rotate_about(&self, pivot: Vec2, angle: f64) -> Self {
        OrientedRect {
            center: pivot + (self.center - pivot).rotate(angle),
            direction: self.direction.rotate(angle),
            ..*self
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::of_points(self.corners()).expect("four corners")
    }
}
