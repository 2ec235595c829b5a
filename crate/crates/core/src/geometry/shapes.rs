use super::{Fatness, GeometryError, GridSpec};
use crate::scalar::Scalar;

fn check_positive<T: Scalar>(what: &str, v: &T) -> Result<(), GeometryError> {
    if *v > T::zero() {
        Ok(())
    } else {
        Err(GeometryError::InvalidShape(format!("{what} must be positive, got {v}")))
    }
}

fn check_dim(len: usize) -> Result<(), GeometryError> {
    if len == 0 {
        Err(GeometryError::InvalidShape("zero-dimensional shape".into()))
    } else {
        Ok(())
    }
}

fn square<T: Scalar>(v: T) -> T {
    v.clone() * v
}

/// Open axis-parallel cube `prod_i (corner_i, corner_i + width)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube<T> {
    corner: Vec<T>,
    width: T,
}

impl<T: Scalar> Cube<T> {
    pub fn new(corner: Vec<T>, width: T) -> Result<Self, GeometryError> {
        check_dim(corner.len())?;
        check_positive("cube width", &width)?;
        Ok(Cube { corner, width })
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self) -> &[T] {
        &self.corner
    }

    pub fn width(&self) -> &T {
        &self.width
    }

    pub fn upper(&self, axis: usize) -> T {
        self.corner[axis].clone() + self.width.clone()
    }

    pub fn center(&self) -> Vec<T> {
        self.corner
            .iter()
            .map(|c| c.clone() + self.width.half())
            .collect()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim()
            && p.iter().enumerate().all(|(i, &x)| {
                let x = T::from_int(x);
                self.corner[i] < x && x < self.upper(i)
            })
    }

    /// Integers strictly inside `(corner_i, corner_i + width)`, as an
    /// inclusive range that may be empty (`lo > hi`).
    pub fn lattice_range(&self, axis: usize) -> (i64, i64) {
        open_range(&self.corner[axis], &self.upper(axis))
    }

    /// Geometric containment of the open cube `other` in this one.
    pub fn contains_cube(&self, other: &Cube<T>) -> bool {
        other.dim() == self.dim()
            && (0..self.dim())
                .all(|i| self.corner[i] <= other.corner[i] && other.upper(i) <= self.upper(i))
    }

    pub fn is_inside(&self, grid: &GridSpec) -> bool {
        let zero = T::zero();
        let n = T::from_int(grid.n());
        self.dim() == grid.dim()
            && (0..self.dim()).all(|i| self.corner[i] >= zero && self.upper(i) <= n)
    }
}

/// Integers `x` with `lo < x < hi`.
pub(crate) fn open_range<T: Scalar>(lo: &T, hi: &T) -> (i64, i64) {
    (lo.floor_int() + 1, hi.ceil_int() - 1)
}

/// Open Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<T> {
    center: Vec<T>,
    radius: T,
}

impl<T: Scalar> Ball<T> {
    pub fn new(center: Vec<T>, radius: T) -> Result<Self, GeometryError> {
        check_dim(center.len())?;
        check_positive("ball radius", &radius)?;
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    /// `r^2 - sum_i (p_i - c_i)^2` over the given leading coordinates.
    pub(crate) fn slack(&self, prefix: &[i64]) -> T {
        prefix.iter().zip(&self.center).fold(
            square(self.radius.clone()),
            |acc, (&x, c)| acc - square(T::from_int(x) - c.clone()),
        )
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.center.len() && self.slack(p) > T::zero()
    }
}

/// Open axis-parallel box `prod_i (corner_i, corner_i + widths_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox<T> {
    corner: Vec<T>,
    widths: Vec<T>,
}

impl<T: Scalar> AxisBox<T> {
    pub fn new(corner: Vec<T>, widths: Vec<T>) -> Result<Self, GeometryError> {
        check_dim(corner.len())?;
        if widths.len() != corner.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: corner.len(),
                found: widths.len(),
            });
        }
        for w in &widths {
            check_positive("box width", w)?;
        }
        Ok(AxisBox { corner, widths })
    }

    pub fn corner(&self) -> &[T] {
        &self.corner
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn upper(&self, axis: usize) -> T {
        self.corner[axis].clone() + self.widths[axis].clone()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.corner.len()
            && p.iter().enumerate().all(|(i, &x)| {
                let x = T::from_int(x);
                self.corner[i] < x && x < self.upper(i)
            })
    }

    pub fn lattice_range(&self, axis: usize) -> (i64, i64) {
        open_range(&self.corner[axis], &self.upper(axis))
    }

    fn min_width(&self) -> T {
        min_of(&self.widths)
    }

    fn max_width(&self) -> T {
        max_of(&self.widths)
    }
}

fn min_of<T: Scalar>(v: &[T]) -> T {
    v.iter()
        .skip(1)
        .fold(v[0].clone(), |m, x| if *x < m { x.clone() } else { m })
}

fn max_of<T: Scalar>(v: &[T]) -> T {
    v.iter()
        .skip(1)
        .fold(v[0].clone(), |m, x| if *x > m { x.clone() } else { m })
}

/// The shape kinds an instance may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Cube,
    Ball,
    Box,
}

impl ShapeKind {
    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Cube => "cube",
            ShapeKind::Ball => "ball",
            ShapeKind::Box => "box",
        }
    }
}

impl std::str::FromStr for ShapeKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "cube" => Ok(ShapeKind::Cube),
            "ball" | "disk" => Ok(ShapeKind::Ball),
            "box" => Ok(ShapeKind::Box),
            other => Err(GeometryError::InvalidShape(format!("unknown shape {other:?}"))),
        }
    }
}

/// An open fat object. All objects are open sets: a lattice point on the
/// boundary is outside.
#[derive(Clone, Debug, PartialEq)]
pub enum FatObject<T> {
    Cube(Cube<T>),
    Ball(Ball<T>),
    Box(AxisBox<T>),
}

/// Geometry the lattice machinery needs from an object. [`FatObject`] is the
/// only implementor shipped; other convex shapes can plug in here.
pub trait FatRegion<T: Scalar> {
    fn dim(&self) -> usize;

    fn contains(&self, p: &[i64]) -> bool;

    /// Smallest axis-parallel cube containing the region.
    fn enclosing_cube(&self) -> Cube<T>;

    /// Square of the in-width (always exact, unlike the in-width itself).
    fn in_width_sq(&self) -> T;

    fn fatness(&self) -> Fatness;

    /// Integers `x` in `[lo, hi]` with `prefix ++ [x]` inside the region,
    /// assuming the region meets every line in one interval.
    fn row_range(&self, prefix: &[i64], lo: i64, hi: i64) -> Option<(i64, i64)> {
        let mut p = prefix.to_vec();
        p.push(0);
        let mut first = None;
        let mut last = None;
        for x in lo..=hi {
            *p.last_mut().unwrap() = x;
            if self.contains(&p) {
                first.get_or_insert(x);
                last = Some(x);
            }
        }
        Some((first?, last?))
    }
}

impl<T: Scalar> FatObject<T> {
    pub fn cube(corner: Vec<T>, width: T) -> Result<Self, GeometryError> {
        Cube::new(corner, width).map(FatObject::Cube)
    }

    pub fn ball(center: Vec<T>, radius: T) -> Result<Self, GeometryError> {
        Ball::new(center, radius).map(FatObject::Ball)
    }

    pub fn axis_box(corner: Vec<T>, widths: Vec<T>) -> Result<Self, GeometryError> {
        AxisBox::new(corner, widths).map(FatObject::Box)
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            FatObject::Cube(_) => ShapeKind::Cube,
            FatObject::Ball(_) => ShapeKind::Ball,
            FatObject::Box(_) => ShapeKind::Box,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FatObject::Cube(c) => c.dim(),
            FatObject::Ball(b) => b.center.len(),
            FatObject::Box(b) => b.corner.len(),
        }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        match self {
            FatObject::Cube(c) => c.contains(p),
            FatObject::Ball(b) => b.contains(p),
            FatObject::Box(b) => b.contains(p),
        }
    }

    pub fn center(&self) -> Vec<T> {
        match self {
            FatObject::Cube(c) => c.center(),
            FatObject::Ball(b) => b.center.clone(),
            FatObject::Box(b) => (0..b.corner.len())
                .map(|i| b.corner[i].clone() + b.widths[i].half())
                .collect(),
        }
    }

    /// Width of the smallest enclosing cube.
    pub fn out_width(&self) -> T {
        match self {
            FatObject::Cube(c) => c.width.clone(),
            FatObject::Ball(b) => b.radius.clone() + b.radius.clone(),
            FatObject::Box(b) => b.max_width(),
        }
    }

    /// Square of the width of the largest inscribed cube.
    pub fn in_width_sq(&self) -> T {
        match self {
            FatObject::Cube(c) => square(c.width.clone()),
            // (2r / sqrt d)^2
            FatObject::Ball(b) => {
                square(b.radius.clone()) * T::from_int(4) / T::from_int(b.center.len() as i64)
            }
            FatObject::Box(b) => square(b.min_width()),
        }
    }

    /// Width of the largest inscribed cube; for a ball this needs
    /// `sqrt(dim)` in `T`.
    pub fn in_width(&self) -> Result<T, GeometryError> {
        match self {
            FatObject::Cube(c) => Ok(c.width.clone()),
            FatObject::Ball(b) => {
                let root = T::sqrt_int(b.center.len() as u64).ok_or(
                    GeometryError::Unrepresentable("in-width of a ball needs sqrt(dim)"),
                )?;
                Ok((b.radius.clone() + b.radius.clone()) / root)
            }
            FatObject::Box(b) => Ok(b.min_width()),
        }
    }

    /// Smallest enclosing cube, centred on the object.
    pub fn enclosing_cube(&self) -> Cube<T> {
        let w = self.out_width();
        let corner = self.center().into_iter().map(|c| c - w.half()).collect();
        Cube { corner, width: w }
    }

    /// Largest inscribed cube, centred on the object.
    pub fn inscribed_cube(&self) -> Result<Cube<T>, GeometryError> {
        let w = self.in_width()?;
        let corner = self.center().into_iter().map(|c| c - w.half()).collect();
        Ok(Cube { corner, width: w })
    }

    /// Exact fatness `out_width / in_width`.
    pub fn fatness(&self) -> Fatness {
        match self {
            FatObject::Cube(_) => Fatness::one(),
            FatObject::Ball(b) => {
                Fatness::sqrt_of(b.center.len() as u64).expect("dimension is at least 1")
            }
            FatObject::Box(b) => {
                let ratio = b.max_width() / b.min_width();
                let q = ratio.to_rational().unwrap_or_else(|| {
                    // irrational aspect ratio: round up so the bound stays valid
                    let f = ratio.to_f64() * (1.0 + 1e-12);
                    num_rational::BigRational::from_float(f).expect("finite aspect ratio")
                });
                Fatness::from_ratio(q).expect("max/min is at least 1")
            }
        }
    }

    /// `beta * self + v`.
    pub fn dilate(&self, beta: &T, v: &[T]) -> Result<Self, GeometryError> {
        if *beta <= T::zero() {
            return Err(GeometryError::InvalidShape(format!("dilation factor {beta} must be positive")));
        }
        if v.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let map = |xs: &[T]| -> Vec<T> {
            xs.iter()
                .zip(v)
                .map(|(x, t)| beta.clone() * x.clone() + t.clone())
                .collect()
        };
        let scale = |xs: &[T]| -> Vec<T> { xs.iter().map(|x| beta.clone() * x.clone()).collect() };
        Ok(match self {
            FatObject::Cube(c) => FatObject::Cube(Cube {
                corner: map(&c.corner),
                width: beta.clone() * c.width.clone(),
            }),
            FatObject::Ball(b) => FatObject::Ball(Ball {
                center: map(&b.center),
                radius: beta.clone() * b.radius.clone(),
            }),
            FatObject::Box(b) => FatObject::Box(AxisBox {
                corner: map(&b.corner),
                widths: scale(&b.widths),
            }),
        })
    }

    /// The dilation of `self` whose enclosing cube is exactly `target`.
    pub fn dilate_into(&self, target: &Cube<T>) -> Result<Self, GeometryError> {
        let own = self.enclosing_cube();
        let beta = target.width.clone() / own.width.clone();
        let v: Vec<T> = target
            .corner
            .iter()
            .zip(&own.corner)
            .map(|(t, o)| t.clone() - beta.clone() * o.clone())
            .collect();
        self.dilate(&beta, &v)
    }

    /// Whether the object lies in `(0, n)^d`.
    pub fn is_inside(&self, grid: &GridSpec) -> bool {
        match self {
            FatObject::Box(b) => {
                let zero = T::zero();
                let n = T::from_int(grid.n());
                b.corner.len() == grid.dim()
                    && (0..grid.dim()).all(|i| b.corner[i] >= zero && b.upper(i) <= n)
            }
            _ => self.enclosing_cube().is_inside(grid),
        }
    }

    /// Integers on axis `axis` that can belong to the object.
    pub(crate) fn axis_range(&self, axis: usize) -> (i64, i64) {
        match self {
            FatObject::Cube(c) => c.lattice_range(axis),
            FatObject::Box(b) => b.lattice_range(axis),
            FatObject::Ball(b) => {
                open_range(&(b.center[axis].clone() - b.radius.clone()), &(b.center[axis].clone() + b.radius.clone()))
            }
        }
    }
}

impl<T: Scalar> FatRegion<T> for FatObject<T> {
    fn dim(&self) -> usize {
        FatObject::dim(self)
    }

    fn contains(&self, p: &[i64]) -> bool {
        FatObject::contains(self, p)
    }

    fn enclosing_cube(&self) -> Cube<T> {
        FatObject::enclosing_cube(self)
    }

    fn in_width_sq(&self) -> T {
        FatObject::in_width_sq(self)
    }

    fn fatness(&self) -> Fatness {
        FatObject::fatness(self)
    }

    fn row_range(&self, prefix: &[i64], lo: i64, hi: i64) -> Option<(i64, i64)> {
        let axis = prefix.len();
        let clamp = |(a, b): (i64, i64)| {
            let (a, b) = (a.max(lo), b.min(hi));
            (a <= b).then_some((a, b))
        };
        match self {
            FatObject::Cube(_) | FatObject::Box(_) => {
                let inside = prefix.iter().enumerate().all(|(i, &x)| {
                    let (a, b) = self.axis_range(i);
                    a <= x && x <= b
                });
                if inside {
                    clamp(self.axis_range(axis))
                } else {
                    None
                }
            }
            FatObject::Ball(b) => {
                let slack = b.slack(prefix);
                if slack <= T::zero() {
                    return None;
                }
                let c = &b.center[axis];
                let inside = |x: i64| square(T::from_int(x) - c.clone()) < slack;
                // the chord is symmetric about c, so if it holds an integer it
                // holds floor(c) or floor(c) + 1
                let f = c.floor_int();
                let seed = [f, f + 1].into_iter().find(|&x| inside(x))?;
                let (lo_all, hi_all) = self.axis_range(axis);
                let last = last_true(seed, hi_all, &inside);
                let first = -last_true(-seed, -lo_all, &|x| inside(-x));
                clamp((first, last))
            }
        }
    }
}

/// Largest `x` in `[from, limit]` with `pred(x)`, given `pred(from)` and
/// that `pred` is true on a prefix of the range.
fn last_true(from: i64, limit: i64, pred: &dyn Fn(i64) -> bool) -> i64 {
    let (mut good, mut bad) = (from, limit + 1);
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}
