//! Lattice points, dyadic levels and fat objects.
//!
//! The grid is `P = {1, .., N-1}^d`. A coordinate's level is its 2-adic
//! valuation; a point's level is the minimum over its coordinates; an object's
//! level is the maximum over the grid points it contains.

mod fatness;
mod format;
mod grid;
mod lattice;
mod shapes;

use thiserror::Error;

pub use fatness::Fatness;
pub use format::{Num, ShapeRecord};
pub use grid::{int_level, point_level, GridSpec, Point};
pub use lattice::{
    count_grid_points, count_level, count_level_at_least, for_each_grid_point, grid_points_in,
    has_grid_point, object_level, points_of_level,
};
pub use shapes::{AxisBox, Ball, Cube, FatObject, FatRegion, ShapeKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("level of {0} is undefined (coordinates must be positive)")]
    LevelUndefined(i64),
    #[error("object contains no grid point")]
    EmptyObject,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("outside the grid: {0}")]
    OutsideGrid(String),
    #[error("invalid fatness: {0}")]
    InvalidFatness(String),
    #[error("not representable in this scalar type: {0}")]
    Unrepresentable(&'static str),
}
