use crate::error::{Error, Result};
use crate::geometry::{OrientedRect, Vec2};
use crate::quadrature::integrate;

/// `{t : a - t b ∈ [-h, h]}`, `None` when empty.
fn slab(a: f64, b: f64, h: f64) -> Option<(f64, f64)> {
    if b == 0.0 {
        return (a.abs() <= h).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (p, q) = ((a - h) / b, (a + h) / b);
    Some((p.min(q), p.max(q)))
}

/// The interval `{t : x - t w ∈ r}`.
fn rect_times(x: Vec2, r: &OrientedRect, w: Vec2) -> Option<(f64, f64)> {
    let d = r.direction;
    let n = d.perp();
    let rel = x - r.center;
    let (a0, a1) = slab(rel.dot(d), w.dot(d), r.length / 2.0)?;
    let (b0, b1) = slab(rel.dot(n), w.dot(n), r.width / 2.0)?;
    Some((a0.max(b0), a1.min(b1)))
}

/// `p.v. ∫ χ_R1(x - t w1) χ_R2(x - t w2) dt / t` in closed form.
pub fn s_w_value(x: Vec2, r1: &OrientedRect, r2: &OrientedRect, w1: Vec2, w2: Vec2) -> Result<f64> {
    if w1 == w2 {
        return Err(Error::InvalidInput("w1 and w2 must differ".into()));
    }
    let (Some(i1), Some(i2)) = (rect_times(x, r1, w1), rect_times(x, r2, w2)) else {
        return Ok(0.0);
    };
    let (lo, hi) = (i1.0.max(i2.0), i1.1.min(i2.1));
    if !(lo < hi) {
        return Ok(0.0);
    }
    if lo == 0.0 || hi == 0.0 {
        return Err(Error::Unbounded);
    }
    Ok(hi.abs().ln() - lo.abs().ln())
}

/// Affine function `a + b x`.
#[derive(Clone, Copy, Debug)]
struct Lin {
    a: f64,
    b: f64,
}

impl Lin {
    fn at(self, x: f64) -> f64 {
        self.a + self.b * x
    }
    fn neg(self) -> Lin {
        Lin { a: -self.a, b: -self.b }
    }
}

/// `∫_p^q ln|a + b x| dx`.
fn log_integral(l: Lin, p: f64, q: f64) -> f64 {
    let f = |u: f64| if u == 0.0 { 0.0 } else { u * u.abs().ln() - u };
    if l.b.abs() * (q - p) <= 1e-14 * l.a.abs() {
        return l.a.abs().ln() * (q - p);
    }
    (f(l.at(q)) - f(l.at(p))) / l.b
}

/// Frame data for `R1 = R2 = R` with corner at the origin: `R = [0, L] x [0, W]`.
struct Frame {
    len: f64,
    wid: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
}

impl Frame {
    /// Lower and upper `t`-bounds from the second coordinate (constants).
    fn beta_bounds(&self, x2: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for &b in &self.beta {
            let (p, q) = slab(x2 - self.wid / 2.0, b, self.wid / 2.0)?;
            lo = lo.max(p);
            hi = hi.min(q);
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Lower and upper `t`-bounds from the first coordinate, affine in `x1`,
    /// plus the `x1` range forced by zero `alpha`.
    fn alpha_bounds(&self) -> (Vec<Lin>, Vec<Lin>, (f64, f64)) {
        let (mut lows, mut ups) = (Vec::new(), Vec::new());
        let mut range = (f64::NEG_INFINITY, f64::INFINITY);
        for &a in &self.alpha {
            if a == 0.0 {
                range = (range.0.max(0.0), range.1.min(self.len));
                continue;
            }
            // 0 <= x1 - t a <= L.
            let p = Lin {
                a: -self.len / a,
                b: 1.0 / a,
            };
            let q = Lin { a: 0.0, b: 1.0 / a };
            if a > 0.0 {
                lows.push(p);
                ups.push(q);
            } else {
                lows.push(q);
                ups.push(p);
            }
        }
        (lows, ups, range)
    }

    fn t_bound(&self) -> f64 {
        let da = (self.alpha[0] - self.alpha[1]).abs();
        let db = (self.beta[0] - self.beta[1]).abs();
        let ta = if da > 0.0 { self.len / da } else { f64::INFINITY };
        let tb = if db > 0.0 { self.wid / db } else { f64::INFINITY };
        ta.min(tb)
    }

    /// `∫ |S(x1, x2)| dx1` in closed form.
    fn inner(&self, x2: f64) -> f64 {
        let Some((blo, bhi)) = self.beta_bounds(x2) else {
            return 0.0;
        };
        let (mut lows, mut ups, (r0, r1)) = self.alpha_bounds();
        lows.push(Lin { a: blo, b: 0.0 });
        ups.push(Lin { a: bhi, b: 0.0 });
        let tb = self.t_bound();
        let amax = self.alpha[0].abs().max(self.alpha[1].abs());
        let x0 = r0.max(-amax * tb - 1e-12);
        let x1 = r1.min(self.len + amax * tb + 1e-12);
        if !(x0 < x1) {
            return 0.0;
        }
        let mut lines: Vec<Lin> = Vec::with_capacity(2 * lows.len() + ups.len() + 1);
        lines.extend(lows.iter().copied());
        lines.extend(ups.iter().copied());
        lines.extend(lows.iter().map(|l| l.neg()));
        lines.push(Lin { a: 0.0, b: 0.0 });
        let mut xs = vec![x0, x1];
        for i in 0..lines.len() {
            for j in 0..i {
                let db = lines[i].b - lines[j].b;
                if db != 0.0 {
                    let x = (lines[j].a - lines[i].a) / db;
                    if x > x0 && x < x1 {
                        xs.push(x);
                    }
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in xs.windows(2) {
            let (p, q) = (w[0], w[1]);
            if q <= p {
                continue;
            }
            let m = 0.5 * (p + q);
            let lo = *lows.iter().max_by(|a, b| a.at(m).total_cmp(&b.at(m))).expect("bounds");
            let hi = *ups.iter().min_by(|a, b| a.at(m).total_cmp(&b.at(m))).expect("bounds");
            if lo.at(m) >= hi.at(m) {
                continue;
            }
            total += (log_integral(hi, p, q) - log_integral(lo, p, q)).abs();
        }
        total
    }

    /// `x2` values where the inner integral changes analytic form.
    fn outer_breakpoints(&self) -> Vec<f64> {
        let (lows, ups, (r0, r1)) = self.alpha_bounds();
        let mut stat: Vec<Lin> = Vec::new();
        stat.extend(lows.iter().copied());
        stat.extend(ups.iter().copied());
        stat.extend(lows.iter().map(|l| l.neg()));
        stat.push(Lin { a: 0.0, b: 0.0 });
        // Heights of the static arrangement's vertices.
        let mut heights = Vec::new();
        for i in 0..stat.len() {
            for j in 0..i {
                let db = stat[i].b - stat[j].b;
                if db != 0.0 {
                    let x = (stat[j].a - stat[i].a) / db;
                    heights.push(stat[i].at(x));
                }
            }
            for x in [r0, r1] {
                if x.is_finite() {
                    heights.push(stat[i].at(x));
                }
            }
        }
        // Moving constants t = (x2 - s) / beta and their negatives, as x2 = beta * (±t) + s.
        let mut movers: Vec<(f64, f64)> = Vec::new();
        for &b in &self.beta {
            if b != 0.0 {
                movers.push((b, 0.0));
                movers.push((b, self.wid));
            }
        }
        let mut xs = vec![0.0, self.wid];
        for &(b, s) in &movers {
            for &h in &heights {
                xs.push(b * h + s);
                xs.push(-b * h + s);
            }
            for &(b2, s2) in &movers {
                // (x - s)/b = ±(x - s2)/b2.
                for sign in [1.0, -1.0] {
                    let den = 1.0 / b - sign / b2;
                    if den != 0.0 {
                        xs.push((s / b - sign * s2 / b2) / den);
                    }
                }
            }
        }
        xs.retain(|x| x.is_finite());
        xs
    }
}

/// `‖S_w(χ_R, χ_R)‖_1`, exact in the direction of `R` and adaptive
/// Gauss-Kronrod across it.
pub fn s_w_l1_norm(r: &OrientedRect, w1: Vec2, w2: Vec2, tol: f64) -> Result<f64> {
    if w1 == w2 {
        return Err(Error::InvalidInput("w1 and w2 must differ".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let e1 = r.direction;
    let e2 = e1.perp();
    let fr = Frame {
        len: r.length,
        wid: r.width,
        alpha: [w1.dot(e1), w2.dot(e1)],
        beta: [w1.dot(e2), w2.dot(e2)],
    };
    let tb = fr.t_bound();
    let bmax = fr.beta[0].abs().max(fr.beta[1].abs());
    let (y0, y1) = (-bmax * tb, fr.wid + bmax * tb);
    let mut pts: Vec<f64> = fr
        .outer_breakpoints()
        .into_iter()
        .filter(|&x| x > y0 && x < y1)
        .chain([y0, y1])
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|b, a| (*b - *a).abs() <= 1e-14 * (y1 - y0));
    let q = integrate(|x2| fr.inner(x2), &pts, tol, 0.0, 4_000_000)?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_rect() -> OrientedRect {
        OrientedRect::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1.0).unwrap()
    }

    #[test]
    fn closed_forms() {
        // x - t w1 in [-.5,.5]^2 for t in [1, 2] when w1 = (1, 0), x = (1.5, 0).
        let r = OrientedRect::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1.0).unwrap();
        let big = OrientedRect::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 100.0, 100.0).unwrap();
        let v = s_w_value(Vec2::new(1.5, 0.0), &r, &big, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-14);
        let v = s_w_value(Vec2::ZERO, &r, &big, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        assert!(v.abs() < 1e-14);
        let v = s_w_value(Vec2::new(50.0, 0.0), &r, &r, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            s_w_value(Vec2::new(0.5, 0.0), &r, &big, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn log_integral_matches_quadrature() {
        let l = Lin { a: -0.3, b: 2.0 };
        let q = integrate(|x| l.at(x).abs().ln(), &[0.0, 0.15, 1.0], 1e-12, 0.0, 1_000_000).unwrap();
        assert!((log_integral(l, 0.0, 1.0) - q.value).abs() < 1e-9);
    }

    #[test]
    fn inner_matches_pointwise_midpoints() {
        let w1 = Vec2::new(2.0, 1.0);
        let w2 = Vec2::new(1.0, 2.0);
        let d = (w1 - w2).normalized().unwrap();
        let r = OrientedRect::new(Vec2::ZERO, d, 1.0, 0.25).unwrap();
        let e1 = r.direction;
        let e2 = e1.perp();
        let fr = Frame {
            len: 1.0,
            wid: 0.25,
            alpha: [w1.dot(e1), w2.dot(e1)],
            beta: [w1.dot(e2), w2.dot(e2)],
        };
        let corner = r.center - e1 * 0.5 - e2 * 0.125;
        for x2 in [-0.3, 0.01, 0.1, 0.2, 0.4] {
            let n = 400_000;
            let (a, b) = (-3.0, 4.0);
            let h = (b - a) / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let x1 = a + (i as f64 + 0.5) * h;
                let x = corner + e1 * x1 + e2 * x2;
                s += s_w_value(x, &r, &r, w1, w2).unwrap_or(0.0).abs() * h;
            }
            let exact = fr.inner(x2);
            assert!((s - exact).abs() < 2e-3 * exact.max(1e-3), "x2 = {x2}: {s} vs {exact}");
        }
    }

    #[test]
    fn nonnegative_and_zero_when_far() {
        let r = unit_rect();
        let v = s_w_l1_norm(&r, Vec2::new(1.0, 0.5), Vec2::new(0.0, 0.5), 1e-8).unwrap();
        assert!(v > 0.0);
    }
}
