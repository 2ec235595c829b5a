//! Lower-bound adversary.
//!
//! The adversary plays dilations of one base shape. The first object is the
//! dilation whose enclosing cube is `(0, N)^d`. After the opponent answers
//! object `O_j`, the adversary takes the inscribed cube `C'_j` of `O_j`, cuts
//! each axis into `k + 1` equal intervals (`k` = opponent points inside
//! `C'_j`), and keeps, per axis, the first interval whose interior holds no
//! opponent coordinate. The product of those intervals is an empty subcube
//! `S_j`; the next object is the dilation of the base shape inscribed in
//! `S_j`. The game ends when that dilation holds no grid point.
//!
//! Every object is nested in the previous one, so one grid point of the last
//! object hits the whole sequence, while widths shrink by at most a factor
//! `alpha (k_j + 1)` per step. Together these force
//! `log2 N / (1 + log2 alpha)` opponent points.

use std::io::{self, Write};
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Decision, EngineError, EngineState};
use crate::geometry::{
    for_each_grid_point, grid_points_in, has_grid_point, Cube, FatObject, Fatness, GeometryError,
    GridSpec, Point,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("protocol violation at step {step}: {msg}")]
    Protocol { step: usize, msg: String },
    #[error("the game is over")]
    GameOver,
    #[error("adversary invariant broken at step {step}: {msg}")]
    Invariant { step: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Anything that answers objects with points.
pub trait Opponent<T: Scalar> {
    /// Points placed in response to `object`; all previously placed points
    /// remain placed.
    fn respond(&mut self, object: &FatObject<T>) -> Result<Vec<Point>, GameError>;
}

impl<T: Scalar> Opponent<T> for EngineState<T> {
    fn respond(&mut self, object: &FatObject<T>) -> Result<Vec<Point>, GameError> {
        Ok(match self.process(object)? {
            Decision::AlreadyHit => Vec::new(),
            Decision::Added { points, .. } => points,
        })
    }
}

impl<T, F> Opponent<T> for F
where
    T: Scalar,
    F: FnMut(&FatObject<T>) -> Vec<Point>,
{
    fn respond(&mut self, object: &FatObject<T>) -> Result<Vec<Point>, GameError> {
        Ok(self(object))
    }
}

/// Places one uniformly random grid point of each object.
pub struct RandomOpponent {
    grid: GridSpec,
    rng: ChaCha8Rng,
}

impl RandomOpponent {
    pub fn new(grid: GridSpec, seed: u64) -> Self {
        RandomOpponent {
            grid,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<T: Scalar> Opponent<T> for RandomOpponent {
    fn respond(&mut self, object: &FatObject<T>) -> Result<Vec<Point>, GameError> {
        let cube = object.enclosing_cube();
        let ranges: Vec<(i64, i64)> = (0..self.grid.dim())
            .map(|i| {
                let (lo, hi) = cube.lattice_range(i);
                (lo.max(1), hi.min(self.grid.n() - 1))
            })
            .collect();
        if ranges.iter().all(|(lo, hi)| lo <= hi) {
            for _ in 0..64 {
                let p: Vec<i64> = ranges.iter().map(|&(lo, hi)| self.rng.gen_range(lo..=hi)).collect();
                if object.contains(&p) {
                    return Ok(vec![Point::new(&p)]);
                }
            }
        }
        let all = grid_points_in(&self.grid, object);
        if all.is_empty() {
            return Ok(Vec::new());
        }
        let i = self.rng.gen_range(0..all.len());
        Ok(vec![all[i].clone()])
    }
}

/// Dilation of `base` whose enclosing cube is `(0, N)^d`.
pub fn initial_object<T: Scalar>(grid: &GridSpec, base: &FatObject<T>) -> Result<FatObject<T>, GeometryError> {
    if base.dim() != grid.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: grid.dim(),
            found: base.dim(),
        });
    }
    let whole = Cube::new(vec![T::zero(); grid.dim()], T::from_int(grid.n()))?;
    base.dilate_into(&whole)
}

/// A subcube of `cube` of width `width / (k + 1)`, `k = points.len()`, whose
/// interior avoids every point. Per axis the smallest interval index whose
/// open interval holds no point coordinate is chosen; a coordinate exactly on
/// a cut blocks neither neighbour.
pub fn find_empty_subcube<T: Scalar>(cube: &Cube<T>, points: &[Point]) -> Cube<T> {
    let parts = points.len() + 1;
    let step = cube.width().clone() / T::from_int(parts as i64);
    let corner = (0..cube.dim())
        .map(|axis| {
            let origin = &cube.corner()[axis];
            let mut blocked = vec![false; parts];
            for p in points {
                let offset = T::from_int(p.coords()[axis]) - origin.clone();
                let h = (offset.clone() / step.clone()).floor_int();
                let on_cut = offset == step.clone() * T::from_int(h);
                if !on_cut && (0..parts as i64).contains(&h) {
                    blocked[h as usize] = true;
                }
            }
            let h = blocked
                .iter()
                .position(|b| !b)
                .expect("k points block at most k of k + 1 intervals");
            origin.clone() + step.clone() * T::from_int(h as i64)
        })
        .collect();
    Cube::new(corner, step).expect("positive width")
}

/// One step of a finished game, as exported.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct GameStep<T> {
    pub object: FatObject<T>,
    pub opponent_points: Vec<Point>,
    pub k_j: usize,
    #[serde(serialize_with = "ser_num")]
    pub w_j: T,
    #[serde(serialize_with = "ser_num")]
    pub w_j_prime: T,
    /// Empty subcube the next object was built in.
    pub subcube: Cube<T>,
}

fn ser_num<T: Scalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    crate::geometry::Num(v.clone()).serialize(s)
}

/// The adversary's side of the game.
#[derive(Clone, Debug)]
pub struct GameState<T> {
    grid: GridSpec,
    base: FatObject<T>,
    alpha: Fatness,
    objects: Vec<FatObject<T>>,
    /// `(out-width, in-width)` per object.
    widths: Vec<(T, T)>,
    step_counts: Vec<usize>,
    step_points: Vec<Vec<Point>>,
    subcubes: Vec<Cube<T>>,
    algorithm_points: Vec<Point>,
    over: bool,
}

pub enum NextObject<'a, T> {
    Object(&'a FatObject<T>),
    GameOver,
}

impl<T: Scalar> GameState<T> {
    pub fn new(grid: GridSpec, base: FatObject<T>) -> Result<Self, GameError> {
        let first = initial_object(&grid, &base)?;
        let mut state = GameState {
            grid,
            alpha: base.fatness(),
            base,
            objects: Vec::new(),
            widths: Vec::new(),
            step_counts: Vec::new(),
            step_points: Vec::new(),
            subcubes: Vec::new(),
            algorithm_points: Vec::new(),
            over: false,
        };
        if has_grid_point(&grid, &first) {
            state.push_object(first)?;
        } else {
            state.over = true;
        }
        Ok(state)
    }

    fn push_object(&mut self, o: FatObject<T>) -> Result<(), GameError> {
        let w_in = o.in_width()?;
        self.widths.push((o.out_width(), w_in));
        self.objects.push(o);
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn alpha(&self) -> &Fatness {
        &self.alpha
    }

    pub fn objects(&self) -> &[FatObject<T>] {
        &self.objects
    }

    pub fn step_counts(&self) -> &[usize] {
        &self.step_counts
    }

    pub fn widths(&self) -> &[(T, T)] {
        &self.widths
    }

    pub fn subcubes(&self) -> &[Cube<T>] {
        &self.subcubes
    }

    pub fn algorithm_points(&self) -> &[Point] {
        &self.algorithm_points
    }

    pub fn is_over(&self) -> bool {
        self.over
    }

    /// The object the opponent must answer next.
    pub fn current(&self) -> Option<&FatObject<T>> {
        if self.over {
            None
        } else {
            self.objects.last()
        }
    }

    /// Records the opponent's answer to the current object and builds the
    /// next one.
    pub fn next_object(&mut self, points_added: &[Point]) -> Result<NextObject<'_, T>, GameError> {
        let step = self.objects.len();
        let current = self.current().ok_or(GameError::GameOver)?.clone();
        if let Some(p) = points_added.iter().find(|p| !self.grid.contains(p.coords())) {
            return Err(GameError::Protocol {
                step,
                msg: format!("point {p} is not a grid point"),
            });
        }
        if points_added.is_empty() {
            return Err(GameError::Protocol {
                step,
                msg: "an unhit object needs at least one point".into(),
            });
        }
        if !points_added.iter().any(|p| current.contains(p.coords())) {
            return Err(GameError::Protocol {
                step,
                msg: "the placed points leave the object unhit".into(),
            });
        }
        self.step_counts.push(points_added.len());
        self.step_points.push(points_added.to_vec());
        self.algorithm_points.extend(points_added.iter().cloned());

        let inscribed = current.inscribed_cube()?;
        let inside: Vec<Point> = self
            .algorithm_points
            .iter()
            .filter(|p| inscribed.contains(p.coords()))
            .cloned()
            .collect();
        let sub = find_empty_subcube(&inscribed, &inside);
        let next = self.base.dilate_into(&sub)?;
        self.subcubes.push(sub);
        if !has_grid_point(&self.grid, &next) {
            self.over = true;
            return Ok(NextObject::GameOver);
        }
        if let Some(p) = self.algorithm_points.iter().find(|p| next.contains(p.coords())) {
            return Err(GameError::Invariant {
                step: step + 1,
                msg: format!("new object already contains {p}"),
            });
        }
        self.push_object(next)?;
        Ok(NextObject::Object(self.objects.last().unwrap()))
    }

    /// Checks `w_{j+1} * alpha * (k_j + 1) >= w_j` for every recorded pair,
    /// squared to stay exact.
    pub fn recurrence_holds(&self) -> bool {
        let a2 = T::from_rational(self.alpha.alpha_sq());
        self.widths.windows(2).zip(&self.step_counts).all(|(w, &k)| {
            let k1 = T::from_int(k as i64 + 1);
            let lhs = w[1].0.clone() * w[1].0.clone() * a2.clone() * k1.clone() * k1;
            lhs >= w[0].0.clone() * w[0].0.clone()
        })
    }

    /// Checks that each object's enclosing cube sits in the previous object's
    /// inscribed cube.
    pub fn nested(&self) -> bool {
        self.objects.windows(2).all(|w| {
            w[0].inscribed_cube()
                .map(|c| c.contains_cube(&w[1].enclosing_cube()))
                .unwrap_or(false)
        })
    }

    /// A grid point of the last object, which hits every object.
    pub fn certificate(&self) -> Option<Point> {
        let last = self.objects.last()?;
        let mut found = None;
        let _ = for_each_grid_point(&self.grid, last, |p| {
            found = Some(Point::new(p));
            ControlFlow::Break(())
        });
        found
    }

    pub fn trace(&self) -> Vec<GameStep<T>> {
        (0..self.step_counts.len())
            .map(|j| GameStep {
                object: self.objects[j].clone(),
                opponent_points: self.step_points[j].clone(),
                k_j: self.step_counts[j],
                w_j: self.widths[j].0.clone(),
                w_j_prime: self.widths[j].1.clone(),
                subcube: self.subcubes[j].clone(),
            })
            .collect()
    }
}

/// Outcome of a full game.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct GameSummary<T> {
    pub steps: usize,
    pub total_points: usize,
    /// `log2 N / (1 + log2 alpha)`.
    pub bound: f64,
    /// Exact check of `total_points >= bound`.
    pub bound_met: bool,
    pub opt_certificate: Option<Point>,
    /// The certificate lies in every object.
    pub certificate_valid: bool,
    pub recurrence_holds: bool,
    pub nested: bool,
    #[serde(skip)]
    pub objects: Vec<FatObject<T>>,
    #[serde(skip)]
    pub trace: Vec<GameStep<T>>,
}

impl<T: Scalar> GameSummary<T> {
    pub fn write_trace<W: Write>(&self, mut w: W) -> Result<(), GameError> {
        for step in &self.trace {
            serde_json::to_writer(&mut w, step).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut w, self).map_err(io::Error::from)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

/// Upper limit on game length; real games end after `O(log N)` steps.
const MAX_STEPS: usize = 10_000;

/// Plays the whole game against `opponent`.
pub fn play_game<T: Scalar, O: Opponent<T> + ?Sized>(
    grid: GridSpec,
    base: FatObject<T>,
    opponent: &mut O,
) -> Result<GameSummary<T>, GameError> {
    let mut state = GameState::new(grid, base)?;
    while let Some(obj) = state.current().cloned() {
        if state.objects().len() > MAX_STEPS {
            return Err(GameError::Invariant {
                step: state.objects().len(),
                msg: "game did not terminate".into(),
            });
        }
        let points = opponent.respond(&obj)?;
        state.next_object(&points)?;
    }
    let total: usize = state.step_counts().iter().sum();
    let cert = state.certificate();
    let certificate_valid = cert
        .as_ref()
        .is_some_and(|p| state.objects().iter().all(|o| o.contains(p.coords())));
    Ok(GameSummary {
        steps: state.objects().len(),
        total_points: total,
        bound: state.alpha().forced_points(grid.n()),
        bound_met: state.alpha().forced_points_met(total as u64, grid.n()),
        opt_certificate: cert,
        certificate_valid,
        recurrence_holds: state.recurrence_holds(),
        nested: state.nested(),
        trace: state.trace(),
        objects: state.objects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;
    use crate::{Rational, Surd};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn grid(d: usize, n: i64) -> GridSpec {
        GridSpec::new(d, n).unwrap()
    }

    fn unit_cube(d: usize) -> FatObject<Rational> {
        FatObject::cube(vec![r(0); d], r(1)).unwrap()
    }

    #[test]
    fn initial_objects_fill_the_grid() {
        let g = grid(2, 16);
        let ball = FatObject::ball(vec![Surd::from_int(0); 2], Surd::from_int(1)).unwrap();
        assert_eq!(
            initial_object(&g, &ball).unwrap(),
            FatObject::ball(vec![Surd::from_int(8); 2], Surd::from_int(8)).unwrap()
        );
        assert_eq!(
            initial_object(&g, &unit_cube(2)).unwrap(),
            FatObject::cube(vec![r(0), r(0)], r(16)).unwrap()
        );
        let bx = FatObject::axis_box(vec![r(0), r(0)], vec![r(1), r(2)]).unwrap();
        let first = initial_object(&g, &bx).unwrap();
        assert_eq!(first, FatObject::axis_box(vec![r(4), r(0)], vec![r(8), r(16)]).unwrap());
        assert_eq!(first.enclosing_cube(), Cube::new(vec![r(0), r(0)], r(16)).unwrap());
    }

    #[test]
    fn empty_subcube_without_points_is_the_cube() {
        let c = Cube::new(vec![r(0), r(0)], r(6)).unwrap();
        assert_eq!(find_empty_subcube(&c, &[]), c);
    }

    #[test]
    fn empty_subcube_single_point() {
        let c = Cube::new(vec![r(0), r(0)], r(6)).unwrap();
        let s = find_empty_subcube(&c, &[Point::new(&[1, 1])]);
        assert_eq!(s, Cube::new(vec![r(3), r(3)], r(3)).unwrap());
    }

    #[test]
    fn empty_subcube_two_points_brute_force() {
        let c = Cube::new(vec![r(0), r(0)], r(9)).unwrap();
        let pts = [Point::new(&[1, 1]), Point::new(&[4, 4])];
        // oracle: every width-3 index choice whose open square avoids both points
        let valid: Vec<(i64, i64)> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .filter(|&(a, b)| {
                pts.iter().all(|p| {
                    let (x, y) = (p.coords()[0], p.coords()[1]);
                    !(3 * a < x && x < 3 * a + 3 && 3 * b < y && y < 3 * b + 3)
                })
            })
            .collect();
        assert!(!valid.is_empty());
        let s = find_empty_subcube(&c, &pts);
        assert_eq!(s.width(), &r(3));
        assert!(pts.iter().all(|p| !s.contains(p.coords())));
        assert_eq!(s, Cube::new(vec![r(6), r(6)], r(3)).unwrap());
    }

    #[test]
    fn points_on_cuts_block_nothing() {
        let c = Cube::new(vec![r(0)], r(4)).unwrap();
        let s = find_empty_subcube(&c, &[Point::new(&[2])]);
        assert_eq!(s, Cube::new(vec![r(0)], r(2)).unwrap());
    }

    #[test]
    fn protocol_errors() {
        let g = grid(2, 8);
        let mut st = GameState::new(g, unit_cube(2)).unwrap();
        assert!(matches!(st.next_object(&[]), Err(GameError::Protocol { .. })));
        assert!(matches!(
            st.next_object(&[Point::new(&[0, 3])]),
            Err(GameError::Protocol { .. })
        ));
        // a grid point not inside the object (impossible for the first object, so
        // move on one step first)
        st.next_object(&[Point::new(&[4, 4])]).unwrap();
        let cur = st.current().unwrap().clone();
        let outside = g.points().find(|p| !cur.contains(p.coords())).unwrap();
        assert!(matches!(st.next_object(&[outside]), Err(GameError::Protocol { .. })));
    }

    #[test]
    fn one_point_per_step_on_n8() {
        let g = grid(2, 8);
        let mut first_point = |o: &FatObject<Rational>| grid_points_in(&g, o)[..1].to_vec();
        let s = play_game(g, unit_cube(2), &mut first_point).unwrap();
        assert!(s.steps >= 3, "steps = {}", s.steps);
        assert!(s.bound_met && s.certificate_valid && s.recurrence_holds && s.nested);
    }

    #[test]
    fn single_point_grid() {
        let g = grid(2, 2);
        let mut e = EngineState::<Rational>::new(g, Fatness::one());
        let s = play_game(g, unit_cube(2), &mut e).unwrap();
        assert_eq!(s.steps, 1);
        assert_eq!(s.total_points, 1);
        assert!(s.bound_met);
        assert_eq!(s.opt_certificate, Some(Point::new(&[1, 1])));
    }

    #[test]
    fn one_dimensional_n4() {
        let g = grid(1, 4);
        let mut e = EngineState::<Rational>::new(g, Fatness::one());
        let s = play_game(g, unit_cube(1), &mut e).unwrap();
        assert!(s.total_points >= 2);
        assert!(s.bound_met);
    }

    #[test]
    fn ball_game_needs_exact_roots() {
        let g = grid(2, 16);
        let ball = FatObject::ball(vec![r(0), r(0)], r(1)).unwrap();
        assert!(matches!(GameState::new(g, ball), Err(GameError::Geometry(_))));
    }

    #[test]
    fn ball_game_against_engine() {
        let g = grid(2, 256);
        let ball = FatObject::ball(vec![Surd::from_int(0); 2], Surd::from_int(1)).unwrap();
        let cfg = EngineConfig {
            instrument: false,
            ..Default::default()
        };
        let mut e = EngineState::with_config(g, Fatness::sqrt_of(2).unwrap(), cfg);
        let s = play_game(g, ball, &mut e).unwrap();
        assert!(s.bound_met, "{} < {}", s.total_points, s.bound);
        assert!(s.certificate_valid && s.recurrence_holds && s.nested);
        assert_eq!(s.total_points, e.hitting_set().len());
    }

    #[test]
    fn random_opponent_is_seeded() {
        let g = grid(2, 64);
        let run = |seed| {
            let mut o = RandomOpponent::new(g, seed);
            play_game(g, unit_cube(2), &mut o).unwrap().objects
        };
        assert_eq!(run(3), run(3));
        let s = play_game(g, unit_cube(2), &mut RandomOpponent::new(g, 9)).unwrap();
        assert!(s.bound_met);
        assert_eq!(s.total_points, s.steps);
    }

    #[test]
    fn trace_export() {
        let g = grid(2, 8);
        let mut e = EngineState::<Rational>::new(g, Fatness::one());
        let s = play_game(g, unit_cube(2), &mut e).unwrap();
        let mut buf = Vec::new();
        s.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), s.steps + 1);
        assert!(lines[0].starts_with(r#"{"object":{"shape":"cube","corner":[0,0],"width":8},"opponent_points":[[4,4]],"k_j":1,"w_j":8,"w_j_prime":8,"subcube":"#));
        assert!(lines.last().unwrap().contains("\"opt_certificate\""));
    }
}
