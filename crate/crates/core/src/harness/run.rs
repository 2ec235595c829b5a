//! Online runs and adversary games with their reports.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{HarnessError, InstanceFile};
use crate::adversary::{play_game, GameSummary, RandomOpponent};
use crate::engine::{EngineConfig, EngineState};
use crate::geometry::{FatObject, Fatness, GridSpec, Point, ShapeKind};
use crate::oracle::{min_hitting_set, HittingSetResult};
use crate::scalar::Scalar;
use crate::Surd;

/// Measured ratio next to the competitive bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: i64,
    pub alpha: Fatness,
    pub objects: usize,
    pub alg_size: usize,
    pub opt_size: usize,
    pub opt_exact: bool,
    /// `alg_size / opt_size` as `"p/q"`; absent for an empty sequence.
    pub ratio: Option<String>,
    pub ratio_f64: Option<f64>,
    /// `(4 alpha + 1)^(2d) * log2 N`.
    pub bound: f64,
    /// `alg_size <= bound * lower bound on OPT`; absent for an empty sequence.
    pub within_bound: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

impl Report {
    fn new(grid: &GridSpec, alpha: &Fatness, objects: usize, alg: usize, opt: &HittingSetResult) -> Self {
        let (d, n) = (grid.dim(), grid.n());
        let defined = opt.size() > 0;
        Report {
            d,
            n,
            alpha: alpha.clone(),
            objects,
            alg_size: alg,
            opt_size: opt.size(),
            opt_exact: opt.exact,
            ratio: defined.then(|| {
                crate::Rational::new((alg as i64).into(), (opt.size() as i64).into()).to_string()
            }),
            ratio_f64: defined.then(|| alg as f64 / opt.size() as f64),
            bound: alpha.competitive_bound(d, n),
            within_bound: (opt.lower_bound > 0)
                .then(|| alpha.within_competitive_bound(d, n, alg as u64, opt.lower_bound as u64)),
            transcript: None,
        }
    }

    pub const CSV_HEADER: &'static str =
        "d,N,alpha,objects,alg_size,opt_size,opt_exact,ratio,ratio_f64,bound,within_bound";

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let opt = |o: &Option<String>| o.clone().unwrap_or_default();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.n,
            self.alpha,
            self.objects,
            self.alg_size,
            self.opt_size,
            self.opt_exact,
            opt(&self.ratio),
            self.ratio_f64.map(|r| r.to_string()).unwrap_or_default(),
            self.bound,
            self.within_bound.map(|b| b.to_string()).unwrap_or_default(),
        );
        s
    }
}

pub struct OnlineRun<T> {
    pub report: Report,
    pub engine: EngineState<T>,
    pub opt: HittingSetResult,
}

/// Feeds the instance to a fresh engine and solves the offline problem.
pub fn run_online<T: Scalar>(inst: &InstanceFile<T>, budget: u64) -> Result<OnlineRun<T>, HarnessError> {
    run_online_with(inst, budget, EngineConfig::default())
}

pub(crate) fn run_online_with<T: Scalar>(
    inst: &InstanceFile<T>,
    budget: u64,
    config: EngineConfig,
) -> Result<OnlineRun<T>, HarnessError> {
    let grid = inst.grid()?;
    let mut engine = EngineState::with_config(grid, inst.header.alpha.clone(), config);
    for o in &inst.objects {
        engine.process(o)?;
    }
    let opt = min_hitting_set(&grid, &inst.objects, budget)?;
    let report = Report::new(&grid, &inst.header.alpha, inst.objects.len(), engine.hitting_set().len(), &opt);
    Ok(OnlineRun { report, engine, opt })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpponentKind {
    /// The online engine.
    Engine,
    /// One random point per object.
    Baseline,
}

impl std::str::FromStr for OpponentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "engine" => Ok(OpponentKind::Engine),
            "baseline" | "random" => Ok(OpponentKind::Baseline),
            _ => Err(format!("unknown opponent {s:?}; expected engine or baseline")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdversaryParams {
    pub d: usize,
    pub n: i64,
    pub shape: ShapeKind,
    pub opponent: OpponentKind,
    pub seed: u64,
    pub budget: u64,
}

pub struct AdversaryRun {
    pub summary: GameSummary<Surd>,
    pub opt: HittingSetResult,
    pub report: Report,
    /// The oracle certified an optimum of exactly one point.
    pub opt_one: bool,
}

/// Unit-scale template of each shape kind. Boxes have side ratio 2.
pub fn base_shape(d: usize, shape: ShapeKind) -> Result<FatObject<Surd>, HarnessError> {
    let zero = vec![Surd::from_int(0); d];
    Ok(match shape {
        ShapeKind::Cube => FatObject::cube(zero, Surd::from_int(1))?,
        ShapeKind::Ball => FatObject::ball(zero, Surd::from_int(1))?,
        ShapeKind::Box => {
            let mut widths = vec![Surd::from_int(1); d];
            widths[0] = Surd::from_int(2);
            FatObject::axis_box(zero, widths)?
        }
    })
}

pub fn run_adversary(p: &AdversaryParams) -> Result<AdversaryRun, HarnessError> {
    let grid = GridSpec::new(p.d, p.n)?;
    let base = base_shape(p.d, p.shape)?;
    let alpha = base.fatness();
    let summary = match p.opponent {
        OpponentKind::Engine => {
            let config = EngineConfig {
                instrument: false,
                ..Default::default()
            };
            let mut engine = EngineState::with_config(grid, alpha.clone(), config);
            play_game(grid, base, &mut engine)?
        }
        OpponentKind::Baseline => play_game(grid, base, &mut RandomOpponent::new(grid, p.seed))?,
    };
    let opt = min_hitting_set(&grid, &summary.objects, p.budget)?;
    let opt_one = opt.exact && opt.size() == 1;
    let report = Report::new(&grid, &alpha, summary.steps, summary.total_points, &opt);
    Ok(AdversaryRun {
        summary,
        opt,
        report,
        opt_one,
    })
}

/// One game per grid size, in parallel; results keep the order of `ns`.
pub fn run_adversary_sweep(p: &AdversaryParams, ns: &[i64]) -> Vec<Result<AdversaryRun, HarnessError>> {
    ns.par_iter()
        .map(|&n| run_adversary(&AdversaryParams { n, ..p.clone() }))
        .collect()
}

impl AdversaryRun {
    pub fn certificate(&self) -> Option<&Point> {
        self.summary.opt_certificate.as_ref()
    }
}
