use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeometryError;
use crate::scalar::{parse_rational, Scalar};
use crate::Surd;

/// Fatness bound `alpha >= 1`, stored as `alpha^2` so that `sqrt(d)` (balls)
/// and ratios of widths (boxes) are both exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fatness {
    alpha_sq: BigRational,
}

fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

impl Fatness {
    pub fn one() -> Self {
        Fatness {
            alpha_sq: BigRational::one(),
        }
    }

    /// `alpha = sqrt(alpha_sq)`.
    pub fn from_alpha_sq(alpha_sq: BigRational) -> Result<Self, GeometryError> {
        if alpha_sq < BigRational::one() {
            return Err(GeometryError::InvalidFatness(format!(
                "alpha^2 = {alpha_sq} is below 1"
            )));
        }
        Ok(Fatness { alpha_sq })
    }

    /// `alpha = q`.
    pub fn from_ratio(q: BigRational) -> Result<Self, GeometryError> {
        if q < BigRational::one() {
            return Err(GeometryError::InvalidFatness(format!("alpha = {q} is below 1")));
        }
        Ok(Fatness {
            alpha_sq: &q * &q,
        })
    }

    /// `alpha = sqrt(s)`.
    pub fn sqrt_of(s: u64) -> Result<Self, GeometryError> {
        Self::from_alpha_sq(BigRational::from_integer(s.into()))
    }

    pub fn alpha_sq(&self) -> &BigRational {
        &self.alpha_sq
    }

    /// Exact `alpha`.
    pub fn alpha(&self) -> Surd {
        // sqrt(p/q) = sqrt(p q) / q
        let p = self.alpha_sq.numer();
        let q = self.alpha_sq.denom();
        let pq = (p * q).to_u64().expect("fatness too large for exact arithmetic");
        Surd::sqrt(pq) / Surd::rational(BigRational::from_integer(q.clone()))
    }

    /// `alpha` as a rational, when it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        let p = exact_sqrt(self.alpha_sq.numer())?;
        let q = exact_sqrt(self.alpha_sq.denom())?;
        Some(BigRational::new(p, q))
    }

    pub fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.alpha_sq).unwrap_or(f64::NAN).sqrt()
    }

    pub fn log2(&self) -> f64 {
        self.to_f64().log2()
    }

    /// Exact `(4 alpha + 1)^d`.
    pub fn point_bound(&self, dim: usize) -> Surd {
        let base = Surd::from_int(4) * self.alpha() + Surd::one();
        (0..dim).fold(Surd::one(), |acc, _| acc * base.clone())
    }

    /// `floor((4 alpha + 1)^d)`: the most points of one level a cube of width
    /// `alpha * 2^(l+2)` can hold, and the most points one step may add.
    pub fn level_point_bound(&self, dim: usize) -> u64 {
        self.point_bound(dim).floor_int() as u64
    }

    /// Exact `(4 alpha + 1)^(2d)`.
    pub fn competitive_factor(&self, dim: usize) -> Surd {
        self.point_bound(2 * dim)
    }

    /// `(4 alpha + 1)^(2d) * log2 n`.
    pub fn competitive_bound(&self, dim: usize, n: i64) -> f64 {
        Scalar::to_f64(&self.competitive_factor(dim)) * (n as f64).log2()
    }

    /// Whether `alg <= (4 alpha + 1)^(2d) * log2(n) * opt`. Exact when `n` is a
    /// power of two, otherwise decided in floating point.
    pub fn within_competitive_bound(&self, dim: usize, n: i64, alg: u64, opt: u64) -> bool {
        let factor = self.competitive_factor(dim);
        if n > 0 && (n as u64).is_power_of_two() {
            let log = n.trailing_zeros() as i64;
            let rhs = factor * Surd::from_int(log) * Surd::from_int(opt as i64);
            Surd::from_int(alg as i64) <= rhs
        } else {
            (alg as f64) <= self.competitive_bound(dim, n) * opt as f64
        }
    }

    /// `log2 n / (1 + log2 alpha)`, the number of points the adversary forces.
    pub fn forced_points(&self, n: i64) -> f64 {
        (n as f64).log2() / (1.0 + self.log2())
    }

    /// Exact test of `total >= log2 n / (1 + log2 alpha)`, i.e.
    /// `(4 alpha^2)^total >= n^2`.
    pub fn forced_points_met(&self, total: u64, n: i64) -> bool {
        let base = BigRational::from_integer(4.into()) * &self.alpha_sq;
        let lhs: BigRational = Pow::pow(&base, total as u32);
        let n = BigRational::from_integer(n.into());
        lhs >= &n * &n
    }

    /// Accepts `"1"`, `"3/2"` (alpha itself) or `"sqrt(2)"`, `"sqrt(9/4)"`.
    pub fn parse_text(s: &str) -> Result<Self, GeometryError> {
        let s = s.trim();
        let bad = || GeometryError::InvalidFatness(format!("cannot parse fatness {s:?}"));
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            Self::from_alpha_sq(parse_rational(inner).ok_or_else(bad)?)
        } else {
            Self::from_ratio(parse_rational(s).ok_or_else(bad)?)
        }
    }
}

impl fmt::Display for Fatness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "sqrt({})", self.alpha_sq),
        }
    }
}

impl Serialize for Fatness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_rational() {
            Some(q) if q.is_integer() => s.serialize_i64(q.to_integer().to_i64().unwrap_or(i64::MAX)),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Fatness {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match v {
            serde_json::Value::Number(n) if n.is_i64() => n.to_string(),
            serde_json::Value::String(s) => s,
            other => {
                return Err(serde::de::Error::custom(format!(
                    "fatness must be an integer or a string, got {other}"
                )))
            }
        };
        Fatness::parse_text(&text).map_err(serde::de::Error::custom)
    }
}
