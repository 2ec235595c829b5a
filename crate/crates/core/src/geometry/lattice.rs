//! Enumeration of grid points inside objects, organised by dyadic level.

use std::ops::ControlFlow;

use super::grid::level_unchecked;
use super::{Cube, FatRegion, GeometryError, GridSpec, Point};
use crate::scalar::Scalar;

fn clipped_ranges<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R) -> Vec<(i64, i64)> {
    let cube = obj.enclosing_cube();
    (0..grid.dim())
        .map(|i| {
            let (lo, hi) = cube.lattice_range(i);
            (lo.max(1), hi.min(grid.n() - 1))
        })
        .collect()
}

/// Calls `f` on every grid point inside `obj`, in lexicographic order, until
/// `f` breaks.
pub fn for_each_grid_point<T, R, F>(grid: &GridSpec, obj: &R, mut f: F) -> ControlFlow<()>
where
    T: Scalar,
    R: FatRegion<T> + ?Sized,
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    let d = grid.dim();
    if obj.dim() != d {
        return ControlFlow::Continue(());
    }
    let ranges = clipped_ranges(grid, obj);
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return ControlFlow::Continue(());
    }
    let mut p: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let (row_lo, row_hi) = ranges[d - 1];
    loop {
        if let Some((a, b)) = obj.row_range(&p[..d - 1], row_lo, row_hi) {
            for x in a..=b {
                p[d - 1] = x;
                f(&p)?;
            }
        }
        // advance the prefix odometer
        let mut axis = d - 1;
        loop {
            if axis == 0 {
                return ControlFlow::Continue(());
            }
            axis -= 1;
            p[axis] += 1;
            if p[axis] <= ranges[axis].1 {
                break;
            }
            p[axis] = ranges[axis].0;
        }
    }
}

/// Grid points strictly inside `obj`, lexicographically ordered.
pub fn grid_points_in<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R) -> Vec<Point> {
    let mut out = Vec::new();
    let _ = for_each_grid_point(grid, obj, |p| {
        out.push(Point::new(p));
        ControlFlow::Continue(())
    });
    out
}

pub fn count_grid_points<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R) -> u64 {
    let mut n = 0u64;
    let _ = for_each_grid_point(grid, obj, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

pub fn has_grid_point<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R) -> bool {
    for_each_grid_point(grid, obj, |_| ControlFlow::Break(())).is_break()
}

/// Multiples of `2^level` in each clipped axis range.
fn multiples(ranges: &[(i64, i64)], level: u32) -> Vec<Vec<i64>> {
    let step = 1i64 << level;
    ranges
        .iter()
        .map(|&(lo, hi)| {
            let first = (lo + step - 1).div_euclid(step) * step;
            (first..=hi).step_by(step as usize).collect()
        })
        .collect()
}

/// Calls `f` on every grid point in `obj` whose level is at least `level`.
fn for_each_point_at_least<T, R, F>(grid: &GridSpec, obj: &R, level: u32, mut f: F) -> ControlFlow<()>
where
    T: Scalar,
    R: FatRegion<T> + ?Sized,
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    if level == 0 {
        return for_each_grid_point(grid, obj, f);
    }
    let axes = multiples(&clipped_ranges(grid, obj), level);
    if axes.iter().any(Vec::is_empty) {
        return ControlFlow::Continue(());
    }
    let d = axes.len();
    let mut idx = vec![0usize; d];
    let mut p: Vec<i64> = axes.iter().map(|a| a[0]).collect();
    loop {
        if obj.contains(&p) {
            f(&p)?;
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                return ControlFlow::Continue(());
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                p[axis] = axes[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            p[axis] = axes[axis][0];
        }
    }
}

/// Maximum level over the grid points inside `obj`.
///
/// Searches from the top level down, so only lattice points of level at least
/// the answer are ever visited.
pub fn object_level<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R) -> Result<u32, GeometryError> {
    if obj.dim() != grid.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: grid.dim(),
            found: obj.dim(),
        });
    }
    for level in (0..=grid.max_level()).rev() {
        if for_each_point_at_least(grid, obj, level, |_| ControlFlow::Break(())).is_break() {
            return Ok(level);
        }
    }
    Err(GeometryError::EmptyObject)
}

/// Grid points inside `obj` of exactly `level`, lexicographically ordered.
pub fn points_of_level<T: Scalar, R: FatRegion<T> + ?Sized>(grid: &GridSpec, obj: &R, level: u32) -> Vec<Point> {
    let mut out = Vec::new();
    if level > grid.max_level() || obj.dim() != grid.dim() {
        return out;
    }
    let _ = for_each_point_at_least(grid, obj, level, |p| {
        if level_unchecked(p) == level {
            out.push(Point::new(p));
        }
        ControlFlow::Continue(())
    });
    out
}

/// Number of grid points of level at least `level` inside the open cube,
/// computed as a product of per-axis counts of multiples of `2^level`.
pub fn count_level_at_least<T: Scalar>(grid: &GridSpec, cube: &Cube<T>, level: u32) -> u64 {
    if cube.dim() != grid.dim() || level >= 63 {
        return 0;
    }
    let step = 1i64 << level;
    (0..grid.dim())
        .map(|i| {
            let (lo, hi) = cube.lattice_range(i);
            let (lo, hi) = (lo.max(1), hi.min(grid.n() - 1));
            if lo > hi {
                0
            } else {
                (hi.div_euclid(step) - (lo - 1).div_euclid(step)) as u64
            }
        })
        .product()
}

/// Number of grid points of exactly `level` inside the open cube.
pub fn count_level<T: Scalar>(grid: &GridSpec, cube: &Cube<T>, level: u32) -> u64 {
    count_level_at_least(grid, cube, level) - count_level_at_least(grid, cube, level + 1)
}
