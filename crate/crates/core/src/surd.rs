//! Exact arithmetic in a real quadratic field `Q(sqrt m)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{parse_rational, rational_floor, Scalar};

/// `rational + coeff * sqrt(radicand)` with a square-free radicand.
///
/// The representation is canonical: a value with `coeff == 0` always has
/// `radicand == 0`, so structural equality is value equality. Combining two
/// irrational values with different radicands panics; a single game or
/// instance only ever uses one radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    coeff: BigRational,
    radicand: u64,
}

fn squarefree_split(n: u64) -> (u64, u64) {
    // n = k^2 * m
    let mut k = 1u64;
    let mut m = n;
    let mut f = 2u64;
    while f * f <= m {
        while m.is_multiple_of(f * f) {
            m /= f * f;
            k *= f;
        }
        f += 1;
    }
    (k, m)
}

impl Surd {
    pub fn new(rational: BigRational, coeff: BigRational, radicand: u64) -> Self {
        if coeff.is_zero() || radicand == 0 {
            return Self::rational(rational);
        }
        let (k, m) = squarefree_split(radicand);
        let coeff = coeff * BigRational::from_integer(BigInt::from(k));
        if m == 1 {
            return Self::rational(rational + coeff);
        }
        Surd {
            rational,
            coeff,
            radicand: m,
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Surd {
            rational: q,
            coeff: BigRational::zero(),
            radicand: 0,
        }
    }

    /// Exact `sqrt(n)`.
    pub fn sqrt(n: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    fn radicand_with(&self, other: &Surd) -> u64 {
        match (self.radicand, other.radicand) {
            (0, m) | (m, 0) => m,
            (a, b) if a == b => a,
            (a, b) => panic!("cannot combine sqrt({a}) and sqrt({b}) in one field"),
        }
    }

    fn m(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.radicand))
    }

    pub fn signum(&self) -> Ordering {
        let a = self.rational.cmp(&BigRational::zero());
        let b = self.coeff.cmp(&BigRational::zero());
        match (a, b) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // opposite signs: compare a^2 against b^2 m
                let lhs = &self.rational * &self.rational;
                let rhs = &self.coeff * &self.coeff * self.m();
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    fn conjugate(&self) -> Surd {
        Surd {
            rational: self.rational.clone(),
            coeff: -self.coeff.clone(),
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{}+{}*sqrt({})", self.rational, self.coeff, self.radicand)
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.radicand == other.radicand {
            // skip the subtraction in the common case
            if self.coeff == other.coeff {
                return self.rational.cmp(&other.rational);
            }
        }
        (self.clone() - other.clone()).signum()
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        let m = self.radicand_with(&rhs);
        Surd::new(self.rational + rhs.rational, self.coeff + rhs.coeff, m)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            rational: -self.rational,
            coeff: -self.coeff,
            radicand: self.radicand,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let m = self.radicand_with(&rhs);
        let mq = BigRational::from_integer(BigInt::from(m));
        let rational = &self.rational * &rhs.rational + &self.coeff * &rhs.coeff * mq;
        let coeff = &self.rational * &rhs.coeff + &self.coeff * &rhs.rational;
        Surd::new(rational, coeff, m)
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        if rhs.coeff.is_zero() {
            assert!(!rhs.rational.is_zero(), "division by zero");
            let m = self.radicand;
            return Surd::new(
                self.rational / &rhs.rational,
                self.coeff / &rhs.rational,
                m,
            );
        }
        let norm = &rhs.rational * &rhs.rational - &rhs.coeff * &rhs.coeff * rhs.m();
        let num = self * rhs.conjugate();
        Surd::new(num.rational / &norm, num.coeff / &norm, num.radicand)
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeff.is_zero() && self.rational.is_zero()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::rational(BigRational::one())
    }
}

impl Scalar for Surd {
    fn from_int(v: i64) -> Self {
        Surd::rational(BigRational::from_integer(BigInt::from(v)))
    }

    fn from_rational(q: &BigRational) -> Self {
        Surd::rational(q.clone())
    }

    fn floor_int(&self) -> i64 {
        if self.coeff.is_zero() {
            return rational_floor(&self.rational);
        }
        let mut f = Scalar::to_f64(self).floor() as i64;
        while *self < Self::from_int(f) {
            f -= 1;
        }
        while *self >= Self::from_int(f + 1) {
            f += 1;
        }
        f
    }

    fn sqrt_int(n: u64) -> Option<Self> {
        Some(Surd::sqrt(n))
    }

    fn to_rational(&self) -> Option<BigRational> {
        self.coeff.is_zero().then(|| self.rational.clone())
    }

    fn to_f64(&self) -> f64 {
        let a = ToPrimitive::to_f64(&self.rational).unwrap_or(f64::NAN);
        if self.coeff.is_zero() {
            return a;
        }
        let b = ToPrimitive::to_f64(&self.coeff).unwrap_or(f64::NAN);
        a + b * (self.radicand as f64).sqrt()
    }

    fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        let Some(prefix) = s.strip_suffix(')') else {
            return parse_rational(s).map(Surd::rational);
        };
        let (head, m) = prefix.rsplit_once("*sqrt(")?;
        let m: u64 = m.trim().parse().ok()?;
        // head is "a+b"; a may carry a leading sign
        let split = head[1..].find('+')? + 1;
        let a = parse_rational(&head[..split])?;
        let b = parse_rational(&head[split + 1..])?;
        Some(Surd::new(a, b, m))
    }
}

impl Surd {
    pub fn abs(&self) -> Surd {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn rational_abs_coeff(&self) -> BigRational {
        self.coeff.abs()
    }
}
