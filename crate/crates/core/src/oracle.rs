//! Exact offline minimum hitting set.
//!
//! Reduction happens in two stages. An object whose grid points include all
//! grid points of another object is implied: hitting the smaller one hits it
//! too, so it is dropped from the constraint set. The grid points of the
//! remaining objects are then grouped by signature (the set of remaining
//! objects they hit); one point per signature survives, and signatures that
//! are strict subsets of another are discarded. The optimum of the reduced
//! instance equals the optimum over all grid points.
//!
//! Signatures are computed row by row: along the last axis each object covers
//! one interval of integers, so a row splits into segments of constant
//! signature and only segment starts are inspected.

use std::collections::HashMap;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{for_each_grid_point, has_grid_point, FatObject, FatRegion, GridSpec, Point};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("object {index} contains no grid point")]
    EmptyObject { index: usize },
}

/// Candidate points and their signatures for one object sequence.
#[derive(Clone, Debug)]
pub struct ReducedInstance<T> {
    pub objects: Vec<FatObject<T>>,
    /// Indices into `objects` of the objects that are not implied.
    pub active: Vec<usize>,
    /// Lexicographically sorted.
    pub candidates: Vec<Point>,
    /// Bit `i` of `signatures[c]` is set when candidate `c` hits `objects[active[i]]`.
    pub signatures: Vec<FixedBitSet>,
}

impl<T> ReducedInstance<T> {
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// For each active object, the candidates hitting it.
    fn hitters(&self) -> Vec<FixedBitSet> {
        let mut out = vec![FixedBitSet::with_capacity(self.candidates.len()); self.active.len()];
        for (c, sig) in self.signatures.iter().enumerate() {
            for i in sig.ones() {
                out[i].insert(c);
            }
        }
        out
    }

    fn result(&self, chosen: &[usize], exact: bool, lower_bound: usize) -> HittingSetResult {
        let mut points: Vec<Point> = chosen.iter().map(|&c| self.candidates[c].clone()).collect();
        points.sort();
        let size = points.len();
        HittingSetResult {
            points,
            exact,
            lower_bound: if exact { size } else { lower_bound },
            upper_bound: size,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSetResult {
    pub points: Vec<Point>,
    pub exact: bool,
    pub lower_bound: usize,
    pub upper_bound: usize,
}

impl HittingSetResult {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

impl Serialize for HittingSetResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            size: usize,
            exact: bool,
            points: &'a [Point],
            lower_bound: usize,
            upper_bound: usize,
        }
        Out {
            size: self.size(),
            exact: self.exact,
            points: &self.points,
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
        }
        .serialize(s)
    }
}

/// True when every grid point of `small` lies in `big`.
fn lattice_subset<T: Scalar>(grid: &GridSpec, small: &FatObject<T>, big: &FatObject<T>) -> bool {
    for_each_grid_point(grid, small, |p| {
        if big.contains(p) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    })
    .is_continue()
}

fn clipped(grid: &GridSpec, o: &FatObject<impl Scalar>) -> Vec<(i64, i64)> {
    let c = o.enclosing_cube();
    (0..grid.dim())
        .map(|i| {
            let (lo, hi) = c.lattice_range(i);
            (lo.max(1), hi.min(grid.n() - 1))
        })
        .collect()
}

pub fn reduce<T: Scalar>(grid: &GridSpec, objects: &[FatObject<T>]) -> Result<ReducedInstance<T>, OracleError> {
    if let Some(index) = objects.iter().position(|o| !has_grid_point(grid, o)) {
        return Err(OracleError::EmptyObject { index });
    }
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&a, &b| {
        objects[a]
            .out_width()
            .partial_cmp(&objects[b].out_width())
            .expect("widths are ordered")
            .then(a.cmp(&b))
    });
    let mut active: Vec<usize> = Vec::new();
    for &b in &order {
        if !active.iter().any(|&a| lattice_subset(grid, &objects[a], &objects[b])) {
            active.push(b);
        }
    }
    active.sort_unstable();

    let ranges: Vec<Vec<(i64, i64)>> = active.iter().map(|&i| clipped(grid, &objects[i])).collect();
    let d = grid.dim();
    let mut best: HashMap<FixedBitSet, Point> = HashMap::new();
    let mut intervals: Vec<(usize, i64, i64)> = Vec::with_capacity(active.len());
    for (k, &owner) in active.iter().enumerate() {
        let r = &ranges[k];
        let mut prefix: Vec<i64> = r[..d - 1].iter().map(|x| x.0).collect();
        loop {
            if let Some((a, b)) = objects[owner].row_range(&prefix, r[d - 1].0, r[d - 1].1) {
                intervals.clear();
                for (j, &oj) in active.iter().enumerate() {
                    let rj = &ranges[j];
                    if prefix.iter().zip(rj).any(|(x, (lo, hi))| x < lo || x > hi) {
                        continue;
                    }
                    let (lo, hi) = (rj[d - 1].0.max(a), rj[d - 1].1.min(b));
                    if lo > hi {
                        continue;
                    }
                    if let Some((s, e)) = objects[oj].row_range(&prefix, lo, hi) {
                        intervals.push((j, s, e));
                    }
                }
                let mut cuts: Vec<i64> = intervals.iter().flat_map(|&(_, s, e)| [s, e + 1]).collect();
                cuts.push(a);
                cuts.sort_unstable();
                cuts.dedup();
                for &x in cuts.iter().filter(|&&x| x <= b) {
                    let mut sig = FixedBitSet::with_capacity(active.len());
                    for &(j, s, e) in &intervals {
                        if s <= x && x <= e {
                            sig.insert(j);
                        }
                    }
                    let mut coords = prefix.clone();
                    coords.push(x);
                    let p = Point::new(&coords);
                    best.entry(sig)
                        .and_modify(|q| {
                            if p < *q {
                                *q = p.clone();
                            }
                        })
                        .or_insert(p);
                }
            }
            // advance the prefix odometer
            let mut axis = d - 1;
            let done = loop {
                if axis == 0 {
                    break true;
                }
                axis -= 1;
                prefix[axis] += 1;
                if prefix[axis] <= r[axis].1 {
                    break false;
                }
                prefix[axis] = r[axis].0;
            };
            if done {
                break;
            }
        }
    }

    let sigs: Vec<(FixedBitSet, Point)> = best.into_iter().collect();
    let mut kept: Vec<(Point, FixedBitSet)> = sigs
        .iter()
        .filter(|(s, _)| {
            !sigs
                .iter()
                .any(|(t, _)| s.is_subset(t) && s.count_ones(..) < t.count_ones(..))
        })
        .map(|(s, p)| (p.clone(), s.clone()))
        .collect();
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    let (candidates, signatures) = kept.into_iter().unzip();
    Ok(ReducedInstance {
        objects: objects.to_vec(),
        active,
        candidates,
        signatures,
    })
}

/// Greedy packing of objects no candidate hits together; a lower bound on
/// any hitting set of the objects in `uncovered`.
fn packing_bound(hitters: &[FixedBitSet], uncovered: &FixedBitSet, order: &[usize]) -> usize {
    let mut used = FixedBitSet::with_capacity(hitters.first().map_or(0, |h| h.len()));
    let mut count = 0;
    for &i in order {
        if uncovered.contains(i) && hitters[i].is_disjoint(&used) {
            used.union_with(&hitters[i]);
            count += 1;
        }
    }
    count
}

pub fn greedy_hitting_set<T>(inst: &ReducedInstance<T>) -> HittingSetResult {
    let m = inst.active.len();
    let mut covered = FixedBitSet::with_capacity(m);
    let mut chosen = Vec::new();
    while covered.count_ones(..) < m {
        let (c, _) = inst
            .signatures
            .iter()
            .enumerate()
            .map(|(c, s)| (c, s.difference(&covered).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("every active object has a candidate");
        covered.union_with(&inst.signatures[c]);
        chosen.push(c);
    }
    let lb = root_bound(inst);
    inst.result(&chosen, chosen.len() == lb, lb)
}

fn object_order(hitters: &[FixedBitSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..hitters.len()).collect();
    order.sort_by_key(|&i| (hitters[i].count_ones(..), i));
    order
}

fn root_bound<T>(inst: &ReducedInstance<T>) -> usize {
    let hitters = inst.hitters();
    let mut all = FixedBitSet::with_capacity(inst.active.len());
    all.insert_range(..);
    packing_bound(&hitters, &all, &object_order(&hitters))
}

struct Search<'a> {
    signatures: &'a [FixedBitSet],
    hitters: Vec<FixedBitSet>,
    order: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn run(&mut self, covered: &FixedBitSet, chosen: &mut Vec<usize>) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        let mut uncovered = covered.clone();
        uncovered.toggle_range(..);
        if uncovered.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + packing_bound(&self.hitters, &uncovered, &self.order) >= self.best.len() {
            return;
        }
        let target = uncovered
            .ones()
            .min_by_key(|&i| (self.hitters[i].count_ones(..), i))
            .unwrap();
        let mut options: Vec<(usize, usize)> = self.hitters[target]
            .ones()
            .map(|c| (c, self.signatures[c].intersection(&uncovered).count()))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (c, _) in options {
            let mut next = covered.clone();
            next.union_with(&self.signatures[c]);
            chosen.push(c);
            self.run(&next, chosen);
            chosen.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Minimum hitting set by branch-and-bound over at most `budget` nodes.
pub fn exact_min_hitting_set<T>(inst: &ReducedInstance<T>, budget: u64) -> HittingSetResult {
    let greedy = greedy_hitting_set(inst);
    let lb = greedy.lower_bound;
    if greedy.exact {
        return greedy;
    }
    let hitters = inst.hitters();
    let order = object_order(&hitters);
    let greedy_idx: Vec<usize> = greedy
        .points
        .iter()
        .map(|p| inst.candidates.binary_search(p).expect("greedy picks candidates"))
        .collect();
    let mut search = Search {
        signatures: &inst.signatures,
        hitters,
        order,
        best: greedy_idx,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.run(&FixedBitSet::with_capacity(inst.active.len()), &mut Vec::new());
    let best = std::mem::take(&mut search.best);
    let exact = !search.exhausted || best.len() == lb;
    inst.result(&best, exact, lb)
}

/// Smallest hitting set size by trying every subset of candidates. Only for
/// instances with at most 24 candidates.
pub fn exhaustive_min_hitting_set<T>(inst: &ReducedInstance<T>) -> Option<usize> {
    let c = inst.candidates.len();
    if c > 24 {
        return None;
    }
    let m = inst.active.len();
    (0u32..1 << c)
        .filter(|mask| {
            let mut covered = FixedBitSet::with_capacity(m);
            for i in (0..c).filter(|i| mask >> i & 1 == 1) {
                covered.union_with(&inst.signatures[i]);
            }
            covered.count_ones(..) == m
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

/// Default node budget; desk-scale instances need far fewer.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Reduces and solves in one call.
pub fn min_hitting_set<T: Scalar>(
    grid: &GridSpec,
    objects: &[FatObject<T>],
    budget: u64,
) -> Result<HittingSetResult, OracleError> {
    Ok(exact_min_hitting_set(&reduce(grid, objects)?, budget))
}

pub fn verify_hitting_set<T: Scalar>(objects: &[FatObject<T>], points: &[Point]) -> bool {
    objects
        .iter()
        .all(|o| points.iter().any(|p| o.contains(p.coords())))
}
