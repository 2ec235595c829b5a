use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::GeometryError;

/// The point set `{1, .., n-1}^dim`, i.e. the integer points of `(0, n)^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: i64,
}

impl GridSpec {
    pub fn new(dim: usize, n: i64) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidGrid("dimension must be positive".into()));
        }
        if n < 2 {
            return Err(GeometryError::InvalidGrid(format!("grid bound {n} < 2")));
        }
        Ok(GridSpec { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Highest level any point can have: `floor(log2(n - 1))`.
    pub fn max_level(&self) -> u32 {
        63 - ((self.n - 1) as u64).leading_zeros()
    }

    /// Number of distinct levels, `max_level + 1`.
    pub fn level_count(&self) -> u32 {
        self.max_level() + 1
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        coords.len() == self.dim && coords.iter().all(|&c| 1 <= c && c < self.n)
    }

    pub fn point(&self, coords: &[i64]) -> Result<Point, GeometryError> {
        if coords.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        if !self.contains(coords) {
            return Err(GeometryError::OutsideGrid(format!("{coords:?}")));
        }
        Ok(Point::new(coords))
    }

    /// Number of grid points, `(n - 1)^dim`.
    pub fn size(&self) -> u64 {
        ((self.n - 1) as u64).pow(self.dim as u32)
    }

    /// All grid points in lexicographic order. Only sensible for small grids.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let mut cur: Option<Vec<i64>> = Some(vec![1; self.dim]);
        std::iter::from_fn(move || {
            let out = cur.as_ref().map(|c| Point::new(c))?;
            let c = cur.as_mut().unwrap();
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    cur = None;
                    break;
                }
                axis -= 1;
                c[axis] += 1;
                if c[axis] < self.n {
                    break;
                }
                c[axis] = 1;
            }
            Some(out)
        })
    }
}

/// A lattice point; ordering is lexicographic on the coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(SmallVec<[i64; 4]>);

impl Point {
    pub fn new(coords: &[i64]) -> Self {
        Point(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Level of the point. Panics on a non-positive coordinate, which cannot
    /// occur for points of a grid.
    pub fn level(&self) -> u32 {
        point_level(&self.0).expect("grid points have positive coordinates")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i64]> for Point {
    fn from(c: &[i64]) -> Self {
        Point::new(c)
    }
}

/// Largest `k` with `2^k | i`.
pub fn int_level(i: i64) -> Result<u32, GeometryError> {
    if i <= 0 {
        return Err(GeometryError::LevelUndefined(i));
    }
    Ok(i.trailing_zeros())
}

/// Minimum of [`int_level`] over the coordinates.
pub fn point_level(coords: &[i64]) -> Result<u32, GeometryError> {
    coords
        .iter()
        .map(|&c| int_level(c))
        .try_fold(u32::MAX, |acc, l| l.map(|l| acc.min(l)))
}

/// Unchecked level for hot loops over coordinates known to be positive.
#[inline]
pub(crate) fn level_unchecked(coords: &[i64]) -> u32 {
    coords
        .iter()
        .map(|&c| {
            debug_assert!(c > 0);
            c.trailing_zeros()
        })
        .min()
        .unwrap_or(0)
}
