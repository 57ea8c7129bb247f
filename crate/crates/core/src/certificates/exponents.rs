use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent in `R ∪ {∞}`, kept rational so homogeneity is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn reciprocal(&self) -> Rational64 {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational64::from_integer(0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `1/p'` with `1/p + 1/p' = 1`.
    pub fn dual_reciprocal(&self) -> Rational64 {
        Rational64::from_integer(1) - self.reciprocal()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "+inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let bad = || Error::InvalidInput(format!("cannot parse exponent {s:?}"));
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Rational64::new(n, d)
            }
            None => Rational64::from_integer(s.parse().map_err(|_| bad())?),
        };
        if r == Rational64::from_integer(0) {
            return Err(Error::InvalidInput("exponent 0".into()));
        }
        Ok(Exponent::Finite(r))
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

/// Homogeneous, admissible exponents: `Σ 1/p_j = 1`, `|p_j| >= 1`, and at
/// most one `p_j <= -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[Exponent; 3]", into = "[Exponent; 3]")]
pub struct ExponentTriple([Exponent; 3]);

impl ExponentTriple {
    pub fn new(p: [Exponent; 3]) -> Result<Self> {
        let sum: Rational64 = p.iter().map(|e| e.reciprocal()).sum();
        if sum != Rational64::from_integer(1) {
            return Err(Error::Homogeneity(sum.to_string()));
        }
        let one = Rational64::from_integer(1);
        for (j, e) in p.iter().enumerate() {
            if let Exponent::Finite(r) = e {
                if *r < one && *r > -one {
                    return Err(Error::Inadmissible(format!("|p{}| = |{r}| < 1", j + 1)));
                }
            }
        }
        let negative = p
            .iter()
            .filter(|e| matches!(e, Exponent::Finite(r) if *r <= -one))
            .count();
        if negative > 1 {
            return Err(Error::Inadmissible(format!("{negative} exponents are <= -1")));
        }
        Ok(ExponentTriple(p))
    }

    /// Component `j` in `1..=3`.
    pub fn get(&self, j: usize) -> Exponent {
        self.0[j - 1]
    }

    pub fn values(&self) -> [f64; 3] {
        self.0.map(|e| e.to_f64())
    }

    /// Indices (1-based) whose exponents satisfy `pred`.
    pub fn indices_where(&self, pred: impl Fn(&Exponent) -> bool) -> Vec<usize> {
        (1..=3).filter(|&j| pred(&self.0[j - 1])).collect()
    }
}

impl TryFrom<[Exponent; 3]> for ExponentTriple {
    type Error = Error;
    fn try_from(p: [Exponent; 3]) -> Result<Self> {
        ExponentTriple::new(p)
    }
}

impl From<ExponentTriple> for [Exponent; 3] {
    fn from(t: ExponentTriple) -> Self {
        t.0
    }
}

impl fmt::Display for ExponentTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Comma-separated, e.g. `4,8/5,8` or `4/3, 4/3, -2`.
impl FromStr for ExponentTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("expected three exponents, got {s:?}")));
        }
        let p = [parts[0].parse()?, parts[1].parse()?, parts[2].parse()?];
        ExponentTriple::new(p)
    }
}
