//! Bound-constrained population metaheuristics.
//!
//! Every algorithm minimises an [`Objective`] inside a box [`Bounds`] under a
//! hard evaluation budget. Runs are fully determined by `(algorithm, seed,
//! objective)`: each stochastic component draws from its own ChaCha8 stream
//! of the run seed (see [`stream`]), and population fitness is evaluated in
//! parallel but recorded in index order.

mod aha;
mod benchmarks;
mod cmaes;
mod de;
mod eo;
mod gwo;
mod mpa;
mod pso;
mod sca;
mod trace;
mod woa;

pub use aha::{aha_axial_direction, aha_diagonal_direction, aha_guided_forage, aha_migrate, aha_territorial, Aha};
pub use benchmarks::{Rastrigin, Rosenbrock, Sphere};
pub use cmaes::{Cma, CmaParams, CmaState};
pub use de::{De, DeParams};
pub use eo::Eo;
pub use gwo::Gwo;
pub use mpa::Mpa;
pub use pso::Pso;
pub use sca::Sca;
pub use trace::{RunTrace, TraceRecord};
pub use woa::{woa_move, Woa, WoaDraws};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleConfig, LogSnap};
use crate::{Error, Result};

/// Function to minimise. Failed evaluations should return `f64::INFINITY`;
/// NaN is treated the same way.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> f64;
    /// Working-space dimensions that hold base-10 exponents.
    fn log_dims(&self) -> Vec<usize> {
        Vec::new()
    }
}

/// Per-dimension box constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Config(format!(
                "bounds need equal, non-zero lengths (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::Config(format!("dimension {i}: lower {l} must be below upper {u}")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn max_range(&self) -> f64 {
        (0..self.dim()).map(|i| self.range(i)).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = if v.is_nan() { self.lower[i] } else { v.clamp(self.lower[i], self.upper[i]) };
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim()).map(|i| self.lower[i] + rng.gen::<f64>() * self.range(i)).collect()
    }
}

/// Bounds plus the optional log-grid snapping applied to every new position.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub bounds: Bounds,
    pub snap: Option<LogSnap>,
}

impl SearchSpace {
    pub fn new(bounds: Bounds) -> Self {
        Self { bounds, snap: None }
    }

    pub fn with_snap(bounds: Bounds, snap: Option<LogSnap>) -> Self {
        Self { bounds, snap }
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn repair(&self, x: &mut [f64]) {
        self.bounds.clamp(x);
        if let Some(snap) = &self.snap {
            snap.apply(x);
            self.bounds.clamp(x);
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut x = self.bounds.sample(rng);
        self.repair(&mut x);
        x
    }
}

/// Positions and fitness of a population in working space.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index of the lowest fitness; ties go to the lowest index.
    pub fn best_index(&self) -> usize {
        argmin(&self.fitness)
    }

    pub fn worst_index(&self) -> usize {
        let mut w = 0;
        for (i, f) in self.fitness.iter().enumerate() {
            if *f > self.fitness[w] {
                w = i;
            }
        }
        w
    }

    /// Indices sorted by ascending fitness, stable.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.fitness[a].total_cmp(&self.fitness[b]));
        idx
    }

    /// Mean pairwise Euclidean distance.
    pub fn diversity(&self) -> f64 {
        mean_pairwise_distance(&self.positions)
    }
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn mean_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += distance(&points[i], &points[j]);
        }
    }
    sum / (n * (n - 1) / 2) as f64
}

/// Evaluation gate shared by all algorithms: enforces the budget, records
/// the trace and tracks the best-so-far point.
pub struct Budget<'a> {
    objective: &'a dyn Objective,
    limit: usize,
    stage: &'static str,
    records: Vec<TraceRecord>,
    best: Option<(Vec<f64>, f64)>,
    history: Option<Vec<Vec<f64>>>,
}

impl<'a> Budget<'a> {
    pub fn new(objective: &'a dyn Objective, limit: usize, stage: &'static str) -> Self {
        Self {
            objective,
            limit,
            stage,
            records: Vec::with_capacity(limit),
            best: None,
            history: None,
        }
    }

    /// Keeps every evaluated position until [`Self::take_history`].
    pub fn record_history(&mut self) {
        self.history.get_or_insert_with(Vec::new);
    }

    pub fn take_history(&mut self) -> Vec<Vec<f64>> {
        self.history.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn set_stage(&mut self, stage: &'static str) {
        self.stage = stage;
    }

    pub fn stage(&self) -> &'static str {
        self.stage
    }

    pub fn used(&self) -> usize {
        self.records.len()
    }

    pub fn remaining(&self) -> usize {
        self.limit - self.records.len()
    }

    pub fn exhausted(&self) -> bool {
        self.remaining() == 0
    }

    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }

    pub fn best_fitness(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.1)
    }

    /// Evaluates the first `min(xs.len(), remaining)` points. The returned
    /// vector is shorter than `xs` when the budget runs out.
    pub fn evaluate(&mut self, xs: &[Vec<f64>]) -> Vec<f64> {
        let n = xs.len().min(self.remaining());
        let objective = self.objective;
        let fitness: Vec<f64> = xs[..n]
            .par_iter()
            .map(|x| {
                let f = objective.evaluate(x);
                if f.is_nan() {
                    f64::INFINITY
                } else {
                    f
                }
            })
            .collect();
        for (x, &f) in xs[..n].iter().zip(&fitness) {
            let improved = match &self.best {
                None => true,
                Some((_, b)) => f < *b,
            };
            if improved {
                self.best = Some((x.clone(), f));
            }
            self.records.push(TraceRecord {
                eval_index: self.records.len(),
                fitness: f,
                best_so_far: self.best_fitness(),
                stage: self.stage.to_string(),
            });
            if let Some(h) = &mut self.history {
                h.push(x.clone());
            }
        }
        fitness
    }

    pub fn evaluate_one(&mut self, x: &[f64]) -> Option<f64> {
        self.evaluate(std::slice::from_ref(&x.to_vec())).first().copied()
    }

    pub fn into_trace(self, algo: &str, seed: u64) -> RunTrace {
        let (best_position, best_fitness) = self.best.unwrap_or((Vec::new(), f64::INFINITY));
        RunTrace {
            algo: algo.to_string(),
            seed,
            records: self.records,
            best_position,
            best_fitness,
        }
    }
}

/// ChaCha8 stream ids used within one run.
pub mod stream {
    pub const INIT: u64 = 0;
    pub const WOA: u64 = 1;
    pub const AHA: u64 = 2;
    pub const CMA: u64 = 3;
    pub const NOVELTY: u64 = 4;
    pub const DE: u64 = 5;
    pub const PSO: u64 = 6;
    pub const GWO: u64 = 7;
    pub const MPA: u64 = 8;
    pub const EO: u64 = 9;
    pub const SCA: u64 = 10;
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One iteration of a population algorithm.
pub trait Step {
    /// Evaluations used by one call with a population of `n`.
    fn evals_per_step(&self, n: usize) -> usize {
        n
    }

    /// Advances the population. `progress` is `t / t_max` clamped to `[0, 1]`.
    fn step(&mut self, pop: &mut Population, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng, space: &SearchSpace, progress: f64);
}

/// Uniform initial population, evaluated.
pub fn initial_population(n: usize, space: &SearchSpace, budget: &mut Budget<'_>, seed: u64) -> Population {
    let mut rng = stream_rng(seed, stream::INIT);
    let positions: Vec<Vec<f64>> = (0..n).map(|_| space.sample(&mut rng)).collect();
    let fitness = budget.evaluate(&positions);
    Population {
        positions: positions[..fitness.len()].to_vec(),
        fitness,
    }
}

/// Runs `stepper` until the budget is spent.
pub fn drive(
    stepper: &mut dyn Step,
    pop: &mut Population,
    budget: &mut Budget<'_>,
    rng: &mut ChaCha8Rng,
    space: &SearchSpace,
) {
    let per = stepper.evals_per_step(pop.len()).max(1);
    let t_max = (budget.remaining() / per).max(1);
    let mut t = 0;
    while !budget.exhausted() {
        let progress = (t as f64 / t_max as f64).min(1.0);
        stepper.step(pop, budget, rng, space, progress);
        t += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AlgorithmId {
    De,
    Cmaes,
    Pso,
    Gwo,
    Woa,
    Mpa,
    Aha,
    Eo,
    Sca,
    Eea,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 10] = [
        Self::De,
        Self::Cmaes,
        Self::Pso,
        Self::Gwo,
        Self::Woa,
        Self::Mpa,
        Self::Aha,
        Self::Eo,
        Self::Sca,
        Self::Eea,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::De => "DE",
            Self::Cmaes => "CMAES",
            Self::Pso => "PSO",
            Self::Gwo => "GWO",
            Self::Woa => "WOA",
            Self::Mpa => "MPA",
            Self::Aha => "AHA",
            Self::Eo => "EO",
            Self::Sca => "SCA",
            Self::Eea => "EEA",
        }
    }

    /// Tag written to the trace stage column.
    pub fn stage_tag(&self) -> &'static str {
        match self {
            Self::De => "de",
            Self::Cmaes => "cma",
            Self::Pso => "pso",
            Self::Gwo => "gwo",
            Self::Woa => "woa",
            Self::Mpa => "mpa",
            Self::Aha => "aha",
            Self::Eo => "eo",
            Self::Sca => "sca",
            Self::Eea => "woa",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let up = if up == "CMA-ES" || up == "CMA" { "CMAES".to_string() } else { up };
        Self::ALL
            .into_iter()
            .find(|a| a.name() == up)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Runs one algorithm with its default settings. EEA uses the default
/// [`EnsembleConfig`].
pub fn minimize(
    algo: AlgorithmId,
    objective: &dyn Objective,
    bounds: &Bounds,
    pop_size: usize,
    budget: usize,
    seed: u64,
) -> Result<RunTrace> {
    minimize_with(algo, objective, bounds, pop_size, budget, seed, &EnsembleConfig::default())
}

/// As [`minimize`] with an explicit ensemble configuration for EEA.
pub fn minimize_with(
    algo: AlgorithmId,
    objective: &dyn Objective,
    bounds: &Bounds,
    pop_size: usize,
    budget: usize,
    seed: u64,
    ensemble: &EnsembleConfig,
) -> Result<RunTrace> {
    check_run(objective, bounds, pop_size, budget)?;
    if algo == AlgorithmId::Eea {
        return crate::ensemble::run_eea(objective, bounds, ensemble, pop_size, budget, seed);
    }
    let space = SearchSpace::new(bounds.clone());
    let mut ev = Budget::new(objective, budget, algo.stage_tag());
    let mut pop = initial_population(pop_size, &space, &mut ev, seed);
    let (mut stepper, stream): (Box<dyn Step>, u64) = match algo {
        AlgorithmId::De => (Box::new(De::default()), stream::DE),
        AlgorithmId::Cmaes => {
            let mean = pop.positions[pop.best_index()].clone();
            (Box::new(Cma::new(mean, bounds, pop.len(), CmaParams::default())), stream::CMA)
        }
        AlgorithmId::Pso => (Box::new(Pso::new(&pop, bounds)), stream::PSO),
        AlgorithmId::Gwo => (Box::new(Gwo::default()), stream::GWO),
        AlgorithmId::Woa => (Box::new(Woa::default()), stream::WOA),
        AlgorithmId::Mpa => (Box::new(Mpa::default()), stream::MPA),
        AlgorithmId::Aha => (Box::new(Aha::new(pop.len())), stream::AHA),
        AlgorithmId::Eo => (Box::new(Eo::default()), stream::EO),
        AlgorithmId::Sca => (Box::new(Sca::default()), stream::SCA),
        AlgorithmId::Eea => unreachable!(),
    };
    let mut rng = stream_rng(seed, stream);
    drive(stepper.as_mut(), &mut pop, &mut ev, &mut rng, &space);
    Ok(ev.into_trace(algo.name(), seed))
}

pub(crate) fn check_run(objective: &dyn Objective, bounds: &Bounds, pop_size: usize, budget: usize) -> Result<()> {
    if objective.dim() != bounds.dim() {
        return Err(Error::Config(format!(
            "objective has {} dimensions but bounds have {}",
            objective.dim(),
            bounds.dim()
        )));
    }
    if pop_size == 0 {
        return Err(Error::Config("population size must be positive".into()));
    }
    if budget < pop_size {
        return Err(Error::Config(format!("budget {budget} is below the population size {pop_size}")));
    }
    Ok(())
}
