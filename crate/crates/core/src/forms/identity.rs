use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domains::GammaVec;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::integrate;

/// `f_j(x) = exp(2πi m_j·x) exp(-π|x - a_j|²)` for `j = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTriple {
    pub centers: [Vec2; 3],
    pub freqs: [Vec2; 3],
}

impl GaussianTriple {
    pub fn eval(&self, j: usize, x: Vec2) -> Complex64 {
        let (a, m) = (self.centers[j], self.freqs[j]);
        Complex64::from_polar((-PI * (x - a).norm_sq()).exp(), 2.0 * PI * m.dot(x))
    }

    /// `f̂_j(ξ) = exp(-2πi (ξ - m_j)·a_j) exp(-π|ξ - m_j|²)`.
    pub fn fourier(&self, j: usize, xi: Vec2) -> Complex64 {
        let (a, m) = (self.centers[j], self.freqs[j]);
        let d = xi - m;
        Complex64::from_polar((-PI * d.norm_sq()).exp(), -2.0 * PI * d.dot(a))
    }

    /// `Λ₀ = ∫ f1 f2 f3 dx`.
    pub fn pointwise_form(&self) -> Complex64 {
        let big_m = self.freqs[0] + self.freqs[1] + self.freqs[2];
        let abar = (self.centers[0] + self.centers[1] + self.centers[2]) * (1.0 / 3.0);
        let spread: f64 = self.centers.iter().map(|a| a.norm_sq()).sum::<f64>() - 3.0 * abar.norm_sq();
        let modulus = (-PI * big_m.norm_sq() / 3.0 - PI * spread).exp() / 3.0;
        Complex64::from_polar(modulus, 2.0 * PI * big_m.dot(abar))
    }

    /// `∫ Π f_j(x - t v_j) dx`.
    pub fn sliding_integral(&self, v: &GammaVec, t: f64) -> Complex64 {
        let vs = v.components();
        let moved = GaussianTriple {
            centers: [0, 1, 2].map(|j| self.centers[j] + vs[j] * t),
            freqs: self.freqs,
        };
        let mu: f64 = (0..3).map(|j| self.freqs[j].dot(vs[j])).sum();
        moved.pointwise_form() * Complex64::from_polar(1.0, -2.0 * PI * t * mu)
    }

    /// Same centres, negated modulations.
    pub fn mirror(&self) -> Self {
        GaussianTriple {
            centers: self.centers,
            freqs: self.freqs.map(|m| -m),
        }
    }
}

/// Uniform cell-centred grid on `[-L, L]^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub spacing: f64,
    /// Defaults to `3 + max |m_j|_∞`.
    pub half_width: Option<f64>,
}

impl FrequencyGrid {
    pub fn new(spacing: f64) -> Self {
        FrequencyGrid {
            spacing,
            half_width: None,
        }
    }
}

/// The three forms entering the linear-combination identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityParts {
    pub lambda_tilde: Complex64,
    pub lambda_half: Complex64,
    pub lambda_zero: Complex64,
    pub residual: f64,
}

/// `Λ̃ = p.v. ∫ (∫ Π f_j(x - t v_j) dx) dt / t`, from the closed-form inner
/// integral.
pub fn lambda_tilde_gaussian(triple: &GaussianTriple, v: &GammaVec, tol: f64) -> Result<Complex64> {
    let vs = v.components();
    let vv: f64 = vs.iter().map(|c| c.norm_sq()).sum();
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    // Spread of the moved centres grows like t² |v|²; stop at e^-50.
    let a: f64 = triple.centers.iter().map(|c| c.norm()).sum();
    let tmax = (a + (50.0 / PI).sqrt()) / vv.sqrt() * 2.0 + 1.0;
    let h = |t: f64| (triple.sliding_integral(v, t) - triple.sliding_integral(v, -t)) / t;
    let mut pts: Vec<f64> = (0..=32).map(|k| tmax * k as f64 / 32.0).collect();
    pts.dedup();
    let re = integrate(|t| h(t).re, &pts, tol, 0.0, 2_000_000)?;
    let im = integrate(|t| h(t).im, &pts, tol, 0.0, 2_000_000)?;
    Ok(Complex64::new(re.value, im.value))
}

/// Volume of `{y ∈ [0,1]^k : Σ c_i y_i <= tau}` for `c_i > 0`.
fn cut_cube_volume(c: &[f64], tau: f64) -> f64 {
    let total: f64 = c.iter().sum();
    if tau <= 0.0 {
        return 0.0;
    }
    if tau >= total {
        return 1.0;
    }
    let k = c.len();
    let mut acc = 0.0;
    for mask in 0u32..(1 << k) {
        let shift: f64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| c[i]).sum();
        let r = tau - shift;
        if r > 0.0 {
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * r.powi(k as i32);
        }
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    (acc / (fact * c.iter().product::<f64>())).clamp(0.0, 1.0)
}

/// Fraction of the cube `centre + [-h/2, h/2]^4` where `s0 + a·u > 0`.
fn positive_fraction(s0: f64, a: &[f64; 4], h: f64) -> f64 {
    let reach: f64 = a.iter().map(|x| x.abs()).sum::<f64>() * 0.5 * h;
    if s0 >= reach {
        return 1.0;
    }
    if s0 <= -reach {
        return 0.0;
    }
    let amax = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let c: Vec<f64> = a.iter().map(|x| x.abs() * h).filter(|&x| x > 1e-9 * amax * h).collect();
    // s0 + a·u <= 0  ⇔  Σ |a_i| h y_i <= reach - s0 with y_i uniform on [0, 1].
    1.0 - cut_cube_volume(&c, reach - s0)
}

/// `Λ_P = ∫_{ξ·v > 0} f̂1(ξ1) f̂2(ξ2) f̂3(-ξ1-ξ2) dξ1 dξ2` by the midpoint rule,
/// each cell weighted by the exact fraction of it inside the half-space.
pub fn lambda_half_space(triple: &GaussianTriple, v: &GammaVec, grid: &FrequencyGrid) -> Result<Complex64> {
    let h = grid.spacing;
    if !(h > 0.0) {
        return Err(Error::InvalidInput("grid spacing must be positive".into()));
    }
    let mmax = triple
        .freqs
        .iter()
        .map(|m| m.x.abs().max(m.y.abs()))
        .fold(0.0, f64::max);
    let l = grid.half_width.unwrap_or(3.0 + mmax);
    let tail = (-PI * (l - mmax).max(0.0).powi(2)).exp();
    if tail > 1e-10 {
        return Err(Error::Truncation(tail));
    }
    let n = (2.0 * l / h).round().max(1.0) as usize;
    let h = 2.0 * l / n as f64;
    let node = |i: usize| -l + (i as f64 + 0.5) * h;
    let table = |j: usize| -> Vec<Complex64> {
        let mut t = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                t.push(triple.fourier(j, Vec2::new(node(i), node(k))));
            }
        }
        t
    };
    let f1 = table(0);
    let f2 = table(1);
    // ξ1 + ξ2 = -2L + (i + k + 1) h for i + k in 0..2n-1.
    let m = 2 * n - 1;
    let sum_node = |s: usize| -2.0 * l + (s as f64 + 1.0) * h;
    let mut f3 = Vec::with_capacity(m * m);
    for s in 0..m {
        for u in 0..m {
            f3.push(triple.fourier(2, -Vec2::new(sum_node(s), sum_node(u))));
        }
    }
    let d1 = v.v1 - v.v3;
    let d2 = v.v2 - v.v3;
    let coeffs = [d1.x, d1.y, d2.x, d2.y];
    let cut = 1e-18;
    let cell = h.powi(4);
    let rows: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|a| {
            let a1 = f1[a];
            if a1.norm() < cut {
                return Complex64::new(0.0, 0.0);
            }
            let (i, k) = (a / n, a % n);
            let xi1 = Vec2::new(node(i), node(k));
            let base = xi1.dot(d1);
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..n * n {
                let a2 = f2[b];
                if a2.norm() < cut {
                    continue;
                }
                let (p, q) = (b / n, b % n);
                let s = base + Vec2::new(node(p), node(q)).dot(d2);
                let w = positive_fraction(s, &coeffs, h);
                if w == 0.0 {
                    continue;
                }
                acc += a2 * f3[(i + p) * m + (k + q)] * w;
            }
            a1 * acc
        })
        .collect();
    Ok(rows.iter().sum::<Complex64>() * cell)
}

pub fn identity_parts(triple: &GaussianTriple, v: &GammaVec, grid: &FrequencyGrid) -> Result<IdentityParts> {
    let lt = lambda_tilde_gaussian(triple, v, 1e-12)?;
    let lp = lambda_half_space(triple, v, grid)?;
    let l0 = triple.pointwise_form();
    let i_pi = Complex64::new(0.0, PI);
    let residual = (lt + i_pi * (lp * 2.0 - l0)).norm() / (lt.norm() + lp.norm() + l0.norm());
    Ok(IdentityParts {
        lambda_tilde: lt,
        lambda_half: lp,
        lambda_zero: l0,
        residual,
    })
}

/// `|Λ̃ + iπ(2Λ_P - Λ₀)| / (|Λ̃| + |Λ_P| + |Λ₀|)`.
pub fn identity_residual(triple: &GaussianTriple, v: &GammaVec, grid: &FrequencyGrid) -> Result<f64> {
    Ok(identity_parts(triple, v, grid)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> GaussianTriple {
        GaussianTriple {
            centers: [Vec2::new(0.1, -0.2), Vec2::new(-0.3, 0.1), Vec2::new(0.2, 0.25)],
            freqs: [Vec2::new(0.4, 0.1), Vec2::new(-0.2, 0.3), Vec2::new(-0.1, -0.5)],
        }
    }

    #[test]
    fn fourier_transform_matches_direct_quadrature() {
        let t = triple();
        let xi = Vec2::new(0.3, -0.4);
        let (n, l) = (200, 5.0);
        let h = 2.0 * l / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                let x = Vec2::new(-l + (i as f64 + 0.5) * h, -l + (k as f64 + 0.5) * h);
                s += t.eval(1, x) * Complex64::from_polar(1.0, -2.0 * PI * x.dot(xi));
            }
        }
        s *= h * h;
        assert!((s - t.fourier(1, xi)).norm() < 1e-10);
    }

    #[test]
    fn pointwise_form_matches_direct_quadrature() {
        let t = triple();
        let (n, l) = (240, 6.0);
        let h = 2.0 * l / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                let x = Vec2::new(-l + (i as f64 + 0.5) * h, -l + (k as f64 + 0.5) * h);
                s += t.eval(0, x) * t.eval(1, x) * t.eval(2, x);
            }
        }
        s *= h * h;
        assert!((s - t.pointwise_form()).norm() < 1e-10);
    }

    #[test]
    fn cut_cube_simple_cases() {
        assert!((cut_cube_volume(&[2.0], 0.5) - 0.25).abs() < 1e-15);
        assert!((cut_cube_volume(&[1.0, 1.0], 0.6) - 0.18).abs() < 1e-15);
        assert!((cut_cube_volume(&[1.0, 1.0], 1.5) - (1.0 - 0.125)).abs() < 1e-15);
        assert!((positive_fraction(0.0, &[1.0, -2.0, 0.5, 0.0], 0.1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cut_cube_matches_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let c = [0.3, 1.1, 0.7, 2.0];
        for tau in [0.2, 1.0, 2.05, 3.9] {
            let m = 400_000;
            let hits = (0..m)
                .filter(|_| c.iter().map(|ci| ci * rng.gen::<f64>()).sum::<f64>() <= tau)
                .count();
            let mc = hits as f64 / m as f64;
            assert!(
                (cut_cube_volume(&c, tau) - mc).abs() < 4e-3,
                "tau {tau}: {} vs {mc}",
                cut_cube_volume(&c, tau)
            );
        }
    }

    proptest::proptest! {
        #[test]
        fn cut_cube_complement(c in proptest::collection::vec(0.05f64..3.0, 1..=4), f in 0.0f64..1.0) {
            let total: f64 = c.iter().sum();
            let tau = f * total;
            let sum = cut_cube_volume(&c, tau) + cut_cube_volume(&c, total - tau);
            proptest::prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn truncation_reported() {
        let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        let g = FrequencyGrid {
            spacing: 0.25,
            half_width: Some(1.0),
        };
        assert!(matches!(
            lambda_half_space(&triple(), &v, &g),
            Err(Error::Truncation(_))
        ));
    }
}
