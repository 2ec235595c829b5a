//! Number types the geometry is generic over.
//!
//! Predicates only need an ordered field with exact comparison against
//! integers. [`BigRational`] is the default; [`crate::Surd`] extends it with a
//! single square root so that balls in non-square dimension have exactly
//! representable inscribed cubes. The float impls exist for quick
//! exploration and are not exact.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    /// Greatest integer `<= self`.
    fn floor_int(&self) -> i64;

    /// Least integer `>= self`.
    fn ceil_int(&self) -> i64 {
        -(-self.clone()).floor_int()
    }

    /// `sqrt(n)` if this type can hold it exactly.
    fn sqrt_int(n: u64) -> Option<Self>;

    /// The value as a rational, if it is one.
    fn to_rational(&self) -> Option<BigRational>;

    fn to_f64(&self) -> f64;

    /// Inverse of the `Display` form.
    fn parse_text(s: &str) -> Option<Self>;

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }
}

pub(crate) fn rational_floor(q: &BigRational) -> i64 {
    q.floor().to_integer().to_i64().expect("coordinate exceeds i64")
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn floor_int(&self) -> i64 {
        rational_floor(self)
    }

    fn sqrt_int(n: u64) -> Option<Self> {
        let r = n.sqrt();
        (r * r == n).then(|| Self::from_int(r as i64))
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn from_rational(q: &BigRational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }

            fn floor_int(&self) -> i64 {
                self.floor() as i64
            }

            fn sqrt_int(n: u64) -> Option<Self> {
                Some((n as $t).sqrt())
            }

            fn to_rational(&self) -> Option<BigRational> {
                BigRational::from_float(*self)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn parse_text(s: &str) -> Option<Self> {
                s.trim()
                    .parse()
                    .ok()
                    .or_else(|| parse_rational(s).map(|q| Self::from_rational(&q)))
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// True when `x` is an integer value.
pub fn is_integral<T: Scalar>(x: &T) -> bool {
    x.to_rational().is_some_and(|q| q.is_integer())
}
