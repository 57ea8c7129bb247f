//! Domains `{F < 0}` in `R^4 = R^2 x R^2`, their normals inside
//! `Gamma = {xi1 + xi2 + xi3 = 0}`, coordinate slices and direction fields.

mod slice;

pub use slice::{direction_field, slice_curvature, ArcSpec, DirectionField, DirectionSample, EnclosingBall, SliceSpec};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

pub type R4 = [f64; 4];

/// A vector of `Gamma`: three plane components summing to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaVec {
    pub v1: Vec2,
    pub v2: Vec2,
    pub v3: Vec2,
}

impl GammaVec {
    pub fn new(v1: Vec2, v2: Vec2, v3: Vec2) -> Result<Self> {
        let v = GammaVec { v1, v2, v3 };
        let s = v1 + v2 + v3;
        if !(v1.is_finite() && v2.is_finite() && v3.is_finite()) {
            return Err(Error::InvalidInput("non-finite Gamma vector".into()));
        }
        if s.norm() > 1e-10 * v.max_component().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "components sum to ({:e}, {:e}), not zero",
                s.x, s.y
            )));
        }
        Ok(v)
    }

    /// `(a, b, -a - b)`, the image of `(a, b)` under the embedding into Gamma.
    pub fn embed(a: Vec2, b: Vec2) -> Self {
        GammaVec {
            v1: a,
            v2: b,
            v3: -(a + b),
        }
    }

    /// Component `j` in `1..=3`.
    pub fn get(&self, j: usize) -> Vec2 {
        match j {
            1 => self.v1,
            2 => self.v2,
            3 => self.v3,
            _ => panic!("Gamma component index {j} outside 1..=3"),
        }
    }

    pub fn components(&self) -> [Vec2; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn scale(&self, s: f64) -> Self {
        GammaVec {
            v1: self.v1 * s,
            v2: self.v2 * s,
            v3: self.v3 * s,
        }
    }

    pub fn rotate(&self, angle: f64) -> Self {
        GammaVec {
            v1: self.v1.rotate(angle),
            v2: self.v2.rotate(angle),
            v3: self.v3.rotate(angle),
        }
    }

    pub fn dot(&self, o: &GammaVec) -> f64 {
        self.v1.dot(o.v1) + self.v2.dot(o.v2) + self.v3.dot(o.v3)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_component(&self) -> f64 {
        self.v1.norm().max(self.v2.norm()).max(self.v3.norm())
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.v1.x, self.v1.y, self.v2.x, self.v2.y, self.v3.x, self.v3.y]
    }

    /// `w = v_{sigma(j0)} - v_{sigma^2(j0)}` for the cycle `sigma = (1 2 3)`.
    pub fn w(&self, j0: usize) -> Vec2 {
        let s1 = j0 % 3 + 1;
        let s2 = s1 % 3 + 1;
        self.get(s1) - self.get(s2)
    }
}

impl std::ops::Neg for GammaVec {
    type Output = GammaVec;
    fn neg(self) -> GammaVec {
        self.scale(-1.0)
    }
}

/// Defining function of a built-in or user domain.
#[derive(Clone)]
pub enum DomainKind {
    /// `|xi|^2 - 1`.
    Ball,
    /// `sum (xi_i / a_i)^2 - 1`.
    Ellipsoid(R4),
    /// `xi1 xi3 + xi1^2 - xi4`, flat along all three coordinate slices.
    ParaboloidD1,
    /// `xi1^2 + xi3^2 - 1`.
    CylinderDisc,
    /// `a . xi - c`.
    HalfSpace { normal: R4, offset: f64 },
    /// Arbitrary smooth `F`; derivatives by central differences.
    Custom(Arc<dyn Fn(&R4) -> f64 + Send + Sync>),
}

impl fmt::Debug for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Ball => write!(f, "Ball"),
            DomainKind::Ellipsoid(a) => write!(f, "Ellipsoid({a:?})"),
            DomainKind::ParaboloidD1 => write!(f, "ParaboloidD1"),
            DomainKind::CylinderDisc => write!(f, "CylinderDisc"),
            DomainKind::HalfSpace { normal, offset } => write!(f, "HalfSpace({normal:?}, {offset})"),
            DomainKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelSetDomain {
    pub name: String,
    pub kind: DomainKind,
}

const FD_STEP: f64 = 1e-5;

impl LevelSetDomain {
    pub fn ball() -> Self {
        LevelSetDomain {
            name: "ball4".into(),
            kind: DomainKind::Ball,
        }
    }

    pub fn ellipsoid(a: R4) -> Result<Self> {
        if a.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput("ellipsoid semi-axes must be positive".into()));
        }
        Ok(LevelSetDomain {
            name: format!("ellipsoid4:{},{},{},{}", a[0], a[1], a[2], a[3]),
            kind: DomainKind::Ellipsoid(a),
        })
    }

    pub fn paraboloid_d1() -> Self {
        LevelSetDomain {
            name: "paraboloid-d1".into(),
            kind: DomainKind::ParaboloidD1,
        }
    }

    pub fn cylinder_disc() -> Self {
        LevelSetDomain {
            name: "cylinder-disc".into(),
            kind: DomainKind::CylinderDisc,
        }
    }

    pub fn half_space(normal: R4, offset: f64) -> Result<Self> {
        if normal.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(LevelSetDomain {
            name: format!(
                "halfspace:{},{},{},{},{}",
                normal[0], normal[1], normal[2], normal[3], offset
            ),
            kind: DomainKind::HalfSpace { normal, offset },
        })
    }

    pub fn custom(name: &str, f: impl Fn(&R4) -> f64 + Send + Sync + 'static) -> Self {
        LevelSetDomain {
            name: name.into(),
            kind: DomainKind::Custom(Arc::new(f)),
        }
    }

    pub fn value(&self, x: &R4) -> f64 {
        match &self.kind {
            DomainKind::Ball => x.iter().map(|v| v * v).sum::<f64>() - 1.0,
            DomainKind::Ellipsoid(a) => x.iter().zip(a).map(|(v, a)| (v / a).powi(2)).sum::<f64>() - 1.0,
            DomainKind::ParaboloidD1 => x[0] * x[2] + x[0] * x[0] - x[3],
            DomainKind::CylinderDisc => x[0] * x[0] + x[2] * x[2] - 1.0,
            DomainKind::HalfSpace { normal, offset } => normal.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - offset,
            DomainKind::Custom(f) => f(x),
        }
    }

    pub fn gradient(&self, x: &R4) -> R4 {
        match &self.kind {
            DomainKind::Ball => x.map(|v| 2.0 * v),
            DomainKind::Ellipsoid(a) => [0, 1, 2, 3].map(|i| 2.0 * x[i] / (a[i] * a[i])),
            DomainKind::ParaboloidD1 => [x[2] + 2.0 * x[0], 0.0, x[0], -1.0],
            DomainKind::CylinderDisc => [2.0 * x[0], 0.0, 2.0 * x[2], 0.0],
            DomainKind::HalfSpace { normal, .. } => *normal,
            DomainKind::Custom(f) => [0, 1, 2, 3].map(|i| {
                let (mut p, mut m) = (*x, *x);
                p[i] += FD_STEP;
                m[i] -= FD_STEP;
                (f(&p) - f(&m)) / (2.0 * FD_STEP)
            }),
        }
    }

    pub fn hessian(&self, x: &R4) -> [R4; 4] {
        let mut h = [[0.0; 4]; 4];
        match &self.kind {
            DomainKind::Ball => (0..4).for_each(|i| h[i][i] = 2.0),
            DomainKind::Ellipsoid(a) => (0..4).for_each(|i| h[i][i] = 2.0 / (a[i] * a[i])),
            DomainKind::ParaboloidD1 => {
                h[0][0] = 2.0;
                h[0][2] = 1.0;
                h[2][0] = 1.0;
            }
            DomainKind::CylinderDisc => {
                h[0][0] = 2.0;
                h[2][2] = 2.0;
            }
            DomainKind::HalfSpace { .. } => {}
            DomainKind::Custom(_) => {
                let e = 1e-4;
                for i in 0..4 {
                    let (mut p, mut m) = (*x, *x);
                    p[i] += e;
                    m[i] -= e;
                    let (gp, gm) = (self.gradient(&p), self.gradient(&m));
                    for j in 0..4 {
                        h[i][j] = (gp[j] - gm[j]) / (2.0 * e);
                    }
                }
                for i in 0..4 {
                    for j in 0..i {
                        let s = 0.5 * (h[i][j] + h[j][i]);
                        h[i][j] = s;
                        h[j][i] = s;
                    }
                }
            }
        }
        h
    }
}

impl FromStr for LevelSetDomain {
    type Err = Error;

    /// Accepts `ball4`, `ellipsoid4:a,b,c,d`, `paraboloid-d1`,
    /// `cylinder-disc` and `halfspace:a1,a2,a3,a4,c`.
    fn from_str(s: &str) -> Result<Self> {
        let nums = |body: &str, n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = body
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("domain `{s}`: {e}")))?;
            if v.len() != n {
                return Err(Error::InvalidInput(format!("domain `{s}` needs {n} numbers")));
            }
            Ok(v)
        };
        match s.split_once(':') {
            None => match s {
                "ball4" => Ok(Self::ball()),
                "paraboloid-d1" => Ok(Self::paraboloid_d1()),
                "cylinder-disc" => Ok(Self::cylinder_disc()),
                _ => Err(Error::InvalidInput(format!("unknown domain `{s}`"))),
            },
            Some(("ellipsoid4", body)) => {
                let v = nums(body, 4)?;
                Self::ellipsoid([v[0], v[1], v[2], v[3]])
            }
            Some(("halfspace", body)) => {
                let v = nums(body, 5)?;
                Self::half_space([v[0], v[1], v[2], v[3]], v[4])
            }
            _ => Err(Error::InvalidInput(format!("unknown domain `{s}`"))),
        }
    }
}

/// Outward normal of the lifted boundary inside Gamma at `x`, unnormalized.
///
/// With `grad F = (g1, g2)` this is `((2 g1 - g2)/3, (2 g2 - g1)/3, -(g1 + g2)/3)`.
pub fn gamma_normal(domain: &LevelSetDomain, x: &R4) -> Result<GammaVec> {
    let f = domain.value(x);
    if !(f.abs() < 1e-8) {
        return Err(Error::NotOnBoundary(f.abs()));
    }
    let g = domain.gradient(x);
    let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(gn >= 1e-8) {
        return Err(Error::DegenerateGradient(gn));
    }
    Ok(normal_from_gradient(&g))
}

/// Newton steps along the gradient until `|F| <= 1e-14`.
pub fn project_to_boundary(domain: &LevelSetDomain, x: &R4) -> Result<R4> {
    let mut x = *x;
    for _ in 0..100 {
        let f = domain.value(&x);
        if f.abs() <= 1e-14 {
            return Ok(x);
        }
        let g = domain.gradient(&x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if !(gg.sqrt() >= 1e-8) {
            return Err(Error::DegenerateGradient(gg.sqrt()));
        }
        for m in 0..4 {
            x[m] -= f * g[m] / gg;
        }
    }
    let f = domain.value(&x).abs();
    if f < 1e-10 {
        Ok(x)
    } else {
        Err(Error::NotOnBoundary(f))
    }
}

pub fn normal_from_gradient(g: &R4) -> GammaVec {
    let g1 = Vec2::new(g[0], g[1]);
    let g2 = Vec2::new(g[2], g[3]);
    GammaVec {
        v1: (g1 * 2.0 - g2) * (1.0 / 3.0),
        v2: (g2 * 2.0 - g1) * (1.0 / 3.0),
        v3: (g1 + g2) * (-1.0 / 3.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Nondegenerate,
    Degenerate,
    StronglyDegenerate,
}

pub fn classify_vector(v: &GammaVec) -> Result<Degeneracy> {
    let m = v.max_component();
    if !(m > 0.0) {
        return Err(Error::ZeroVector);
    }
    let det = (v.v1 - v.v3).cross(v.v2 - v.v3) / (m * m);
    if det.abs() > 1e-10 {
        return Ok(Degeneracy::Nondegenerate);
    }
    if v.components().iter().any(|c| c.norm() < 1e-10 * m) {
        Ok(Degeneracy::StronglyDegenerate)
    } else {
        Ok(Degeneracy::Degenerate)
    }
}

/// Triangle with vertices `-v1, -v2, -v3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationTriangle {
    pub vertices: [Vec2; 3],
    pub area: f64,
    pub degenerate: bool,
    /// `v1 - v2`, `v2 - v3`, `v3 - v1`.
    pub edges: [Vec2; 3],
}

pub fn configuration_triangle(v: &GammaVec) -> ConfigurationTriangle {
    let area = 0.5 * (v.v1 - v.v3).cross(v.v2 - v.v3).abs();
    ConfigurationTriangle {
        vertices: [-v.v1, -v.v2, -v.v3],
        area,
        degenerate: area < 1e-10,
        edges: [v.v1 - v.v2, v.v2 - v.v3, v.v3 - v.v1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lift(t: &R4) -> GammaVec {
        GammaVec::embed(Vec2::new(t[0], t[1]), Vec2::new(t[2], t[3]))
    }

    /// Random unit tangent to the level set at `x`.
    fn tangent(g: &R4, rng: &mut ChaCha8Rng) -> R4 {
        let mut t: R4 = [0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0));
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let tg: f64 = t.iter().zip(g).map(|(a, b)| a * b).sum();
        for i in 0..4 {
            t[i] -= tg / gg * g[i];
        }
        let n = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        t.map(|v| v / n)
    }

    fn boundary_point(d: &LevelSetDomain, rng: &mut ChaCha8Rng) -> R4 {
        match d.kind {
            DomainKind::ParaboloidD1 => {
                let (a, b, c) = (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                [a, b, c, a * c + a * a]
            }
            DomainKind::CylinderDisc => {
                let t: f64 = rng.gen_range(0.0..6.28);
                [t.cos(), rng.gen_range(-1.0..1.0), t.sin(), rng.gen_range(-1.0..1.0)]
            }
            _ => {
                let dir: R4 = [0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0));
                // Bisection along the ray from the origin (inside for these domains).
                let (mut lo, mut hi) = (0.0, 10.0);
                for _ in 0..200 {
                    let m = 0.5 * (lo + hi);
                    if d.value(&dir.map(|v| v * m)) < 0.0 {
                        lo = m
                    } else {
                        hi = m
                    }
                }
                dir.map(|v| v * lo)
            }
        }
    }

    #[test]
    fn normal_is_orthogonal_to_lifted_tangents() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let domains = [
            LevelSetDomain::ball(),
            LevelSetDomain::ellipsoid([1.0, 2.0, 0.5, 1.5]).unwrap(),
            LevelSetDomain::paraboloid_d1(),
            LevelSetDomain::cylinder_disc(),
            LevelSetDomain::custom("quartic", |x| x.iter().map(|v| v.powi(4)).sum::<f64>() - 1.0),
        ];
        for d in &domains {
            for _ in 0..20 {
                let x = boundary_point(d, &mut rng);
                let v = gamma_normal(d, &x).unwrap();
                let s = v.v1 + v.v2 + v.v3;
                assert!(s.norm() < 1e-12);
                let g = d.gradient(&x);
                for _ in 0..100 {
                    let t = lift(&tangent(&g, &mut rng));
                    assert!(v.dot(&t).abs() < 1e-8 * v.norm().max(1.0), "{}", d.name);
                }
                // Outward: moving along the lifted normal pulled back increases F.
                let g1 = v.v1 - v.v3;
                let g2 = v.v2 - v.v3;
                let step = [g1.x, g1.y, g2.x, g2.y].map(|c| c * 1e-6);
                let y: R4 = [0, 1, 2, 3].map(|i| x[i] + step[i]);
                assert!(d.value(&y) > d.value(&x), "{}", d.name);
            }
        }
    }

    #[test]
    fn ball_normal_example() {
        let v = gamma_normal(&LevelSetDomain::ball(), &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let expect = [0.0, -2.0 / 3.0, 0.0, 4.0 / 3.0, 0.0, -2.0 / 3.0];
        for (a, b) in v.to_array().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn half_space_normal_constant() {
        let d = LevelSetDomain::half_space([1.0, 2.0, -1.0, 0.5], 0.3).unwrap();
        let a = gamma_normal(&d, &[0.3, 0.0, 0.0, 0.0]).unwrap();
        let b = gamma_normal(&d, &[0.0, 0.0, -0.3, 0.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn w_component_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g: R4 = [0, 1, 2, 3].map(|_| rng.gen_range(-2.0..2.0));
            let v = normal_from_gradient(&g);
            let (g1, g2) = (Vec2::new(g[0], g[1]), Vec2::new(g[2], g[3]));
            assert!((v.w(1) - g2).norm() < 1e-14);
            assert!((v.w(2) + g1).norm() < 1e-14);
            assert!((v.w(3) - (g1 - g2)).norm() < 1e-14);
        }
    }

    #[test]
    fn classification_examples() {
        let u = Vec2::from_angle(0.7);
        assert_eq!(classify_vector(&GammaVec::embed(u, u)).unwrap(), Degeneracy::Degenerate);
        assert_eq!(
            classify_vector(&GammaVec::embed(u, -u)).unwrap(),
            Degeneracy::StronglyDegenerate
        );
        let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert_eq!(classify_vector(&v).unwrap(), Degeneracy::Nondegenerate);
        assert!(matches!(classify_vector(&v.scale(0.0)), Err(Error::ZeroVector)));
    }

    #[test]
    fn triangle_examples() {
        let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        let t = configuration_triangle(&v);
        assert!((t.area - 1.5).abs() < 1e-15);
        assert!(!t.degenerate);
        let u = Vec2::from_angle(0.2);
        let t = configuration_triangle(&GammaVec::embed(u, u));
        assert!(t.area < 1e-15 && t.degenerate);
    }

    #[test]
    fn parse_names() {
        for s in [
            "ball4",
            "paraboloid-d1",
            "cylinder-disc",
            "ellipsoid4:1,2,3,4",
            "halfspace:0,0,0,1,0",
        ] {
            let d: LevelSetDomain = s.parse().unwrap();
            assert!(d.value(&[0.0; 4]).is_finite());
        }
        assert!("torus".parse::<LevelSetDomain>().is_err());
        assert!("ellipsoid4:1,2".parse::<LevelSetDomain>().is_err());
    }

    fn arb_gamma() -> impl Strategy<Value = GammaVec> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, c, d)| GammaVec::embed(Vec2::new(a, b), Vec2::new(c, d)))
    }

    proptest! {
        #[test]
        fn classification_scale_invariant(v in arb_gamma(), s in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64]) {
            prop_assume!(v.max_component() > 1e-6);
            prop_assert_eq!(classify_vector(&v).unwrap(), classify_vector(&v.scale(s)).unwrap());
        }

        #[test]
        fn triangle_edges_sum_to_zero(v in arb_gamma()) {
            let t = configuration_triangle(&v);
            let s = t.edges[0] + t.edges[1] + t.edges[2];
            prop_assert!(s.norm() < 1e-12);
        }
    }
}
