//! The online algorithm.
//!
//! The engine keeps a hitting set `P'`. When an object arrives it does nothing
//! if some point of `P'` lies inside; otherwise it adds every grid point of
//! the object whose level equals the object's level. At most
//! `(4 alpha + 1)^d` points are added per step.
//!
//! With instrumentation on, the engine also counts, for every level `l` and
//! grid point `p`, how many objects of level `l` containing `p` were unhit on
//! arrival. Each count stays at most `(4 alpha + 1)^d`, and the engine checks
//! this after every step.

use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    for_each_grid_point, object_level, points_of_level, FatObject, Fatness, GeometryError, GridSpec,
    Point,
};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("object contains no grid point")]
    EmptyObject,
    #[error("object lies outside (0, {n})^{dim}")]
    OutsideGrid { dim: usize, n: i64 },
    #[error("object fatness {object} exceeds the engine bound {bound}")]
    FatnessViolation { object: Box<Fatness>, bound: Box<Fatness> },
    #[error("step added {count} points, more than the bound {bound}")]
    StepBoundViolated { count: usize, bound: u64 },
    #[error("{count} unhit objects of level {level} contain {point}, more than the bound {bound}")]
    CounterExceeded {
        level: u32,
        point: Point,
        count: u32,
        bound: u64,
    },
    #[error("optimum size must be positive")]
    ZeroOpt,
    #[error("replay diverged at step {step}")]
    ReplayMismatch { step: usize },
    #[error("transcript line {line}: {msg}")]
    Transcript { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Outcome of one online step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decision {
    AlreadyHit,
    Added { level: u32, points: Vec<Point> },
}

impl Decision {
    pub fn added(&self) -> &[Point] {
        match self {
            Decision::AlreadyHit => &[],
            Decision::Added { points, .. } => points,
        }
    }
}

/// How the engine decides whether an arriving object is already hit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HitIndex {
    /// Test every chosen point against the object.
    #[default]
    Linear,
    /// Look up every grid point of the object in a unit-cell hash grid.
    Grid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HistoryMode {
    /// Keep every object and decision.
    #[default]
    Full,
    /// Keep only counts.
    CountsOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub hit_index: HitIndex,
    pub history: HistoryMode,
    /// Maintain the per-(level, point) counters. Costs one hash update per
    /// grid point of every unhit object.
    pub instrument: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            hit_index: HitIndex::Linear,
            history: HistoryMode::Full,
            instrument: true,
        }
    }
}

/// One transcript record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Step<T> {
    pub object: FatObject<T>,
    pub decision: Decision,
    pub cumulative_size: usize,
}

/// Measured ratio against a given optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub alg_size: usize,
    pub opt_size: usize,
    pub ratio: Rational,
    /// `(4 alpha + 1)^(2d) * log2 N`.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug)]
pub struct EngineState<T> {
    grid: GridSpec,
    alpha: Fatness,
    config: EngineConfig,
    step_bound: u64,
    chosen: Vec<Point>,
    chosen_set: HashSet<Point>,
    history: Vec<Step<T>>,
    processed: usize,
    unhit: usize,
    counters: HashMap<(u32, Point), u32>,
    max_counter: u32,
}

impl<T: Scalar> EngineState<T> {
    pub fn new(grid: GridSpec, alpha: Fatness) -> Self {
        Self::with_config(grid, alpha, EngineConfig::default())
    }

    pub fn with_config(grid: GridSpec, alpha: Fatness, config: EngineConfig) -> Self {
        let step_bound = alpha.level_point_bound(grid.dim());
        EngineState {
            grid,
            alpha,
            config,
            step_bound,
            chosen: Vec::new(),
            chosen_set: HashSet::new(),
            history: Vec::new(),
            processed: 0,
            unhit: 0,
            counters: HashMap::new(),
            max_counter: 0,
        }
    }

    /// Builds an engine from raw parameters, e.g. `(2, 16, "sqrt(2)")`.
    pub fn from_params(dim: usize, n: i64, alpha: &str) -> Result<Self, EngineError> {
        let grid = GridSpec::new(dim, n)?;
        Ok(Self::new(grid, Fatness::parse_text(alpha)?))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn alpha(&self) -> &Fatness {
        &self.alpha
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// `floor((4 alpha + 1)^d)`.
    pub fn step_bound(&self) -> u64 {
        self.step_bound
    }

    /// `P'` in insertion order.
    pub fn hitting_set(&self) -> &[Point] {
        &self.chosen
    }

    pub fn history(&self) -> &[Step<T>] {
        &self.history
    }

    pub fn processed(&self) -> usize {
        self.processed
    }

    /// Number of objects that were unhit on arrival.
    pub fn unhit_count(&self) -> usize {
        self.unhit
    }

    pub fn counters(&self) -> &HashMap<(u32, Point), u32> {
        &self.counters
    }

    /// Largest counter value seen so far.
    pub fn max_counter(&self) -> u32 {
        self.max_counter
    }

    pub fn is_hit(&self, o: &FatObject<T>) -> bool {
        match self.config.hit_index {
            HitIndex::Linear => self.chosen.iter().any(|p| o.contains(p.coords())),
            HitIndex::Grid => for_each_grid_point(&self.grid, o, |p| {
                if self.chosen_set.contains(&Point::new(p)) {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })
            .is_break(),
        }
    }

    fn validate(&self, o: &FatObject<T>) -> Result<(), EngineError> {
        if o.dim() != self.grid.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.grid.dim(),
                found: o.dim(),
            }
            .into());
        }
        if !o.is_inside(&self.grid) {
            return Err(EngineError::OutsideGrid {
                dim: self.grid.dim(),
                n: self.grid.n(),
            });
        }
        let fat = o.fatness();
        if fat > self.alpha {
            return Err(EngineError::FatnessViolation {
                object: Box::new(fat),
                bound: Box::new(self.alpha.clone()),
            });
        }
        Ok(())
    }

    /// Handles one arriving object. On error the state is unchanged.
    pub fn process(&mut self, o: &FatObject<T>) -> Result<Decision, EngineError> {
        self.validate(o)?;
        if self.is_hit(o) {
            self.record(o, Decision::AlreadyHit);
            return Ok(Decision::AlreadyHit);
        }
        let level = object_level(&self.grid, o).map_err(|e| match e {
            GeometryError::EmptyObject => EngineError::EmptyObject,
            e => e.into(),
        })?;
        let points = points_of_level(&self.grid, o, level);
        if points.len() as u64 > self.step_bound {
            return Err(EngineError::StepBoundViolated {
                count: points.len(),
                bound: self.step_bound,
            });
        }
        if self.config.instrument {
            self.count_object(o, level)?;
        }
        self.unhit += 1;
        if self.config.hit_index == HitIndex::Grid {
            self.chosen_set.extend(points.iter().cloned());
        }
        self.chosen.extend(points.iter().cloned());
        let decision = Decision::Added { level, points };
        self.record(o, decision.clone());
        Ok(decision)
    }

    fn count_object(&mut self, o: &FatObject<T>, level: u32) -> Result<(), EngineError> {
        let mut worst: Option<(Point, u32)> = None;
        let counters = &mut self.counters;
        let _ = for_each_grid_point(&self.grid, o, |p| {
            let c = counters.entry((level, Point::new(p))).or_insert(0);
            *c += 1;
            if worst.as_ref().is_none_or(|(_, w)| *c > *w) {
                worst = Some((Point::new(p), *c));
            }
            ControlFlow::Continue(())
        });
        if let Some((point, count)) = worst {
            self.max_counter = self.max_counter.max(count);
            if count as u64 > self.step_bound {
                return Err(EngineError::CounterExceeded {
                    level,
                    point,
                    count,
                    bound: self.step_bound,
                });
            }
        }
        Ok(())
    }

    fn record(&mut self, o: &FatObject<T>, decision: Decision) {
        self.processed += 1;
        if self.config.history == HistoryMode::Full {
            self.history.push(Step {
                object: o.clone(),
                decision,
                cumulative_size: self.chosen.len(),
            });
        }
    }

    /// `|P'| / opt_size`, with the competitive bound for comparison.
    pub fn ratio_report(&self, opt_size: usize) -> Result<RatioReport, EngineError> {
        if opt_size == 0 {
            return Err(EngineError::ZeroOpt);
        }
        let alg = self.chosen.len();
        let d = self.grid.dim();
        let n = self.grid.n();
        Ok(RatioReport {
            alg_size: alg,
            opt_size,
            ratio: Rational::new((alg as i64).into(), (opt_size as i64).into()),
            bound: self.alpha.competitive_bound(d, n),
            within_bound: self.alpha.within_competitive_bound(d, n, alg as u64, opt_size as u64),
        })
    }

    /// Writes the history as JSON lines.
    pub fn write_transcript<W: Write>(&self, mut w: W) -> Result<(), EngineError> {
        for step in &self.history {
            serde_json::to_writer(&mut w, step).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Feeds the transcript's objects to a fresh engine and checks that every
    /// decision and cumulative size is reproduced.
    pub fn replay(grid: GridSpec, alpha: Fatness, steps: &[Step<T>]) -> Result<Self, EngineError> {
        let mut engine = Self::new(grid, alpha);
        for (i, s) in steps.iter().enumerate() {
            let d = engine.process(&s.object)?;
            if d != s.decision || engine.chosen.len() != s.cumulative_size {
                return Err(EngineError::ReplayMismatch { step: i });
            }
        }
        Ok(engine)
    }
}

/// Parses a JSON-lines transcript.
pub fn read_transcript<T: Scalar, R: BufRead>(r: R) -> Result<Vec<Step<T>>, EngineError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let step = serde_json::from_str(&line).map_err(|e| EngineError::Transcript {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(step);
    }
    Ok(out)
}
