//! Seeded random instances.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HarnessError, InstanceFile, InstanceHeader};
use crate::geometry::{has_grid_point, FatObject, Fatness, GridSpec, ShapeKind};
use crate::Rational;

/// Placement attempts per object before giving up.
const ATTEMPTS: usize = 1000;

#[derive(Clone, Debug)]
pub struct GenParams {
    pub d: usize,
    pub n: i64,
    pub alpha: Fatness,
    pub shapes: Vec<ShapeKind>,
    pub count: usize,
    pub seed: u64,
    /// Largest width; defaults to `N`.
    pub max_width: Option<i64>,
}

/// Coordinates and widths are multiples of `1 / RESOLUTION`.
const RESOLUTION: i64 = 1024;

fn unit(k: i64) -> Rational {
    Rational::new(k.into(), RESOLUTION.into())
}

/// Largest multiple of 1/64 not above `alpha`.
fn alpha_floor(alpha: &Fatness) -> Rational {
    if let Some(a) = alpha.as_rational() {
        return a;
    }
    let mut k = (alpha.to_f64() * 64.0).floor() as i64;
    let sq = |k: i64| Rational::new((k * k).into(), 4096.into());
    while sq(k) > *alpha.alpha_sq() {
        k -= 1;
    }
    while sq(k + 1) <= *alpha.alpha_sq() {
        k += 1;
    }
    Rational::new(k.into(), 64.into())
}

/// One object of `kind` with log-uniform width in `[1, max_width]`, placed
/// uniformly inside `(0, N)^d`, with all values on a fine dyadic grid.
/// Boxes get side ratios up to `alpha`. The object may hold no grid point.
pub fn sample_object<R: Rng>(
    rng: &mut R,
    grid: &GridSpec,
    kind: ShapeKind,
    alpha: &Fatness,
    max_width: i64,
) -> FatObject<Rational> {
    let d = grid.dim();
    let nu = RESOLUTION * grid.n();
    let t: f64 = rng.gen::<f64>() * (max_width as f64).log2();
    let wu = ((RESOLUTION as f64 * t.exp2()).floor() as i64).clamp(RESOLUTION, RESOLUTION * max_width);
    let widths_u: Vec<i64> = match kind {
        ShapeKind::Box => {
            let lo = (Rational::from_integer(wu.into()) / alpha_floor(alpha))
                .ceil()
                .to_integer()
                .to_i64()
                .unwrap_or(wu)
                .clamp(1, wu);
            let mut ws: Vec<i64> = (0..d).map(|_| rng.gen_range(lo..=wu)).collect();
            let full = rng.gen_range(0..d);
            ws[full] = wu;
            ws
        }
        _ => vec![wu; d],
    };
    let corner_u: Vec<i64> = widths_u.iter().map(|&w| rng.gen_range(0..=nu - w)).collect();
    match kind {
        ShapeKind::Cube => FatObject::cube(corner_u.into_iter().map(unit).collect(), unit(wu)),
        ShapeKind::Box => FatObject::axis_box(
            corner_u.into_iter().map(unit).collect(),
            widths_u.into_iter().map(unit).collect(),
        ),
        ShapeKind::Ball => {
            let r = unit(wu) / Rational::from_integer(2.into());
            FatObject::ball(corner_u.into_iter().map(|c| unit(c) + r.clone()).collect(), r)
        }
    }
    .expect("sampled widths are positive")
}

pub fn gen_random(p: &GenParams) -> Result<InstanceFile<Rational>, HarnessError> {
    let grid = GridSpec::new(p.d, p.n)?;
    let max_width = p.max_width.unwrap_or(p.n);
    if max_width > p.n {
        return Err(HarnessError::Params(format!(
            "width {max_width} exceeds N = {}; objects must fit in the grid",
            p.n
        )));
    }
    if max_width < 1 {
        return Err(HarnessError::Params(format!("width {max_width} is below 1")));
    }
    if p.count > 0 && p.shapes.is_empty() {
        return Err(HarnessError::Params("no shape kinds given".into()));
    }
    if p.shapes.contains(&ShapeKind::Ball) && *Fatness::sqrt_of(p.d as u64)?.alpha_sq() > *p.alpha.alpha_sq() {
        return Err(HarnessError::Params(format!(
            "balls in dimension {} have fatness sqrt({}), above alpha = {}",
            p.d, p.d, p.alpha
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut objects = Vec::with_capacity(p.count);
    for i in 0..p.count {
        let kind = *p.shapes.choose(&mut rng).expect("shapes is nonempty");
        let o = (0..ATTEMPTS)
            .map(|_| sample_object(&mut rng, &grid, kind, &p.alpha, max_width))
            .find(|o| has_grid_point(&grid, o))
            .ok_or_else(|| {
                HarnessError::Generation(format!(
                    "object {i}: no {} of width at most {max_width} containing a grid point after {ATTEMPTS} attempts",
                    kind.name()
                ))
            })?;
        objects.push(o);
    }
    let header = InstanceHeader {
        d: p.d,
        n: p.n,
        alpha: p.alpha.clone(),
        seed: Some(p.seed),
    };
    let inst = InstanceFile::new(header, objects);
    inst.validate()?;
    Ok(inst)
}
