//! Online hitting set of fat objects on the integer grid `{1, .., N-1}^d`.
//!
//! * [`geometry`]: lattice points, dyadic levels, cubes, balls and boxes.
//! * [`engine`]: the online algorithm that, for each unhit object, adds every
//!   point of the object's maximum level.
//! * [`adversary`]: the nested-dilation strategy that forces
//!   `log2 N / (1 + log2 alpha)` points while one point hits everything.
//! * [`oracle`]: exact offline minimum hitting set by branch and bound.
//! * [`harness`]: instance files, random generation, reports and the
//!   property-verification suites driven by the CLI.
//!
//! Geometry is generic over a [`Scalar`]; the aliases below fix the exact
//! types used throughout.

pub mod adversary;
pub mod engine;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod scalar;
mod surd;

pub use scalar::Scalar;
pub use surd::Surd;

pub use geometry::{Fatness, GeometryError, GridSpec, Point, ShapeKind};

/// Exact rational scalar used for instances and predicates.
pub type Rational = num_rational::BigRational;

pub type Cube = geometry::Cube<Rational>;
pub type FatObject = geometry::FatObject<Rational>;

/// Objects over `Q(sqrt m)`, used where balls need exact inscribed cubes.
pub type SurdCube = geometry::Cube<Surd>;
pub type SurdObject = geometry::FatObject<Surd>;

/// Floating-point objects; predicates on these are approximate.
pub type FloatObject = geometry::FatObject<f64>;
