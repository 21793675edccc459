//! Ensemble evolutionary algorithm (EEA).
//!
//! One meta-iteration runs WOA, then AHA, then CMA-ES on a shared
//! population. A stage ends at its iteration cap or when the best fitness
//! stops improving by more than `omega` (relative) over
//! `stagnation_window` iterations. Every stage switch offers the population
//! a novelty injection. During the WOA and AHA stages log-encoded
//! dimensions are snapped to a grid of `grid_step` decades; CMA-ES refines
//! without snapping, starting from the best point found so far. Cycles
//! repeat until the evaluation budget is spent.

mod codec;
mod novelty;

pub use codec::{decode_log, encode_log, snap_value, LogSnap};
pub use novelty::{novelty, novelty_inject, InjectionOutcome, NoveltyArchive};

use serde::{Deserialize, Serialize};

use crate::optimizers::{
    check_run, initial_population, stream, stream_rng, Aha, Bounds, Budget, Cma, CmaParams, Objective, Population,
    RunTrace, SearchSpace, Step, Woa,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// WOA iteration cap as a fraction of the run's total iterations.
    pub woa_fraction: f64,
    /// AHA iteration cap as a fraction of the run's total iterations.
    pub aha_fraction: f64,
    /// Stagnation threshold on relative best-fitness improvement.
    pub omega: f64,
    pub stagnation_window: usize,
    /// Stagnation window of the CMA-ES stage in generations; `None` uses
    /// `10 + ceil(30 n / lambda)`.
    pub cma_window: Option<usize>,
    /// Neighbourhood size of the novelty score.
    pub novelty_neighbors: usize,
    /// Share of the population a novelty injection may replace.
    pub novelty_fraction: f64,
    pub novelty: bool,
    /// Archive capacity as a multiple of the evaluation budget.
    pub archive_factor: usize,
    /// Snapping grid for log-encoded dimensions, decades; 0 disables.
    pub grid_step: f64,
    pub cma: CmaParams,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            woa_fraction: 0.3,
            aha_fraction: 0.3,
            omega: 1e-6,
            stagnation_window: 5,
            cma_window: None,
            novelty_neighbors: 6,
            novelty_fraction: 0.2,
            novelty: true,
            archive_factor: 10,
            grid_step: 0.5,
            cma: CmaParams::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let frac_ok = |f: f64| (0.0..=1.0).contains(&f);
        if !frac_ok(self.woa_fraction) || !frac_ok(self.aha_fraction) || self.woa_fraction + self.aha_fraction > 1.0 {
            return Err(Error::Config(format!(
                "stage fractions must lie in [0, 1] and sum to at most 1 (got {} and {})",
                self.woa_fraction, self.aha_fraction
            )));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::Config(format!("omega must be non-negative, got {}", self.omega)));
        }
        if self.stagnation_window == 0 || self.novelty_neighbors == 0 || self.cma_window == Some(0) {
            return Err(Error::Config("stagnation window and novelty neighbourhood must be positive".into()));
        }
        if !frac_ok(self.novelty_fraction) {
            return Err(Error::Config(format!("novelty fraction {} outside [0, 1]", self.novelty_fraction)));
        }
        if !(self.grid_step >= 0.0) || !self.grid_step.is_finite() {
            return Err(Error::Config(format!("grid step must be >= 0, got {}", self.grid_step)));
        }
        Ok(())
    }

    /// Stagnation window of the CMA-ES stage.
    pub fn cma_stagnation_window(&self, dim: usize, lambda: usize) -> usize {
        self.cma_window
            .unwrap_or(10 + (30 * dim).div_ceil(lambda.max(1)))
            .max(self.stagnation_window)
    }

    /// WOA and AHA iteration caps for a run of `total` iterations.
    pub fn stage_caps(&self, total: usize) -> (usize, usize) {
        let cap = |f: f64| (f * total as f64).round() as usize;
        (cap(self.woa_fraction), cap(self.aha_fraction))
    }
}

/// True when the relative improvement from the first to the last entry of
/// `window` is below `omega`. Fitness is minimised.
pub fn detect_stagnation(window: &[f64], omega: f64) -> bool {
    let (Some(&first), Some(&last)) = (window.first(), window.last()) else {
        return false;
    };
    if window.len() < 2 {
        return false;
    }
    let improvement = if first == last {
        0.0
    } else if !first.is_finite() {
        // Leaving an all-failed population counts as progress.
        if last.is_finite() {
            f64::INFINITY
        } else {
            0.0
        }
    } else if first == 0.0 {
        if last < first {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (first - last) / first.abs()
    };
    improvement < omega
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Woa,
    Aha,
    Cma,
}

impl Stage {
    fn tag(self) -> &'static str {
        match self {
            Stage::Woa => "woa",
            Stage::Aha => "aha",
            Stage::Cma => "cma",
        }
    }
}

struct Runner<'o, 'c> {
    cfg: &'c EnsembleConfig,
    budget: Budget<'o>,
    archive: NoveltyArchive,
    explore: SearchSpace,
    exploit: SearchSpace,
    novelty_rng: rand_chacha::ChaCha8Rng,
}

impl Runner<'_, '_> {
    fn space(&self, stage: Stage) -> &SearchSpace {
        match stage {
            Stage::Cma => &self.exploit,
            _ => &self.explore,
        }
    }

    fn switch(&mut self, pop: &mut Population, stage: Stage) {
        self.budget.set_stage(stage.tag());
        if !self.cfg.novelty || self.cfg.novelty_fraction == 0.0 {
            return;
        }
        let space = match stage {
            Stage::Cma => &self.exploit,
            _ => &self.explore,
        };
        let out = novelty_inject(
            pop,
            &mut self.archive,
            self.cfg.novelty_fraction,
            self.cfg.novelty_neighbors,
            space,
            &mut self.budget,
            &mut self.novelty_rng,
        );
        log::debug!("novelty injection into {}: {:?}", stage.tag(), out);
    }

    /// Runs `stepper` for at most `cap` iterations or until the best fitness
    /// found by the stage stagnates.
    fn run_stage(
        &mut self,
        stepper: &mut dyn Step,
        pop: &mut Population,
        rng: &mut rand_chacha::ChaCha8Rng,
        stage: Stage,
        cap: Option<usize>,
    ) {
        let window = match stage {
            Stage::Cma => self.cfg.cma_stagnation_window(pop.positions[0].len(), pop.len()),
            _ => self.cfg.stagnation_window,
        };
        let mut history = Vec::new();
        let mut stage_best = f64::INFINITY;
        let mut t = 0;
        let space = self.space(stage).clone();
        while cap.map_or(true, |c| t < c) && !self.budget.exhausted() {
            let progress = cap.map_or(0.0, |c| t as f64 / c as f64);
            stepper.step(pop, &mut self.budget, rng, &space, progress);
            t += 1;
            if self.cfg.novelty {
                self.archive.extend(self.budget.take_history());
            }
            stage_best = pop.fitness.iter().copied().fold(stage_best, f64::min);
            history.push(stage_best);
            if history.len() > window && detect_stagnation(&history[history.len() - 1 - window..], self.cfg.omega) {
                log::debug!("{} stagnated after {t} iterations", stage.tag());
                break;
            }
        }
    }
}

/// Runs the ensemble. With the default configuration every evaluation in the
/// returned trace is tagged `woa`, `aha` or `cma`.
pub fn run_eea(
    objective: &dyn Objective,
    bounds: &Bounds,
    cfg: &EnsembleConfig,
    pop_size: usize,
    budget: usize,
    seed: u64,
) -> Result<RunTrace> {
    check_run(objective, bounds, pop_size, budget)?;
    cfg.validate()?;
    let log_dims = objective.log_dims();
    let snap = (cfg.grid_step > 0.0 && !log_dims.is_empty()).then(|| LogSnap {
        dims: log_dims,
        step: cfg.grid_step,
    });
    let mut ev = Budget::new(objective, budget, Stage::Woa.tag());
    if cfg.novelty {
        ev.record_history();
    }
    let mut runner = Runner {
        cfg,
        budget: ev,
        archive: NoveltyArchive::new(cfg.archive_factor.saturating_mul(budget)),
        explore: SearchSpace::with_snap(bounds.clone(), snap),
        exploit: SearchSpace::new(bounds.clone()),
        novelty_rng: stream_rng(seed, stream::NOVELTY),
    };
    let mut pop = initial_population(pop_size, &runner.explore, &mut runner.budget, seed);
    if cfg.novelty {
        let h = runner.budget.take_history();
        runner.archive.extend(h);
    }
    let total = ((budget - pop_size) / pop_size).max(1);
    let (i_woa, i_aha) = cfg.stage_caps(total);
    let mut woa_rng = stream_rng(seed, stream::WOA);
    let mut aha_rng = stream_rng(seed, stream::AHA);
    let mut cma_rng = stream_rng(seed, stream::CMA);
    let mut meta = 0usize;
    while !runner.budget.exhausted() {
        if i_woa > 0 {
            if meta > 0 {
                runner.switch(&mut pop, Stage::Woa);
            }
            runner.run_stage(&mut Woa::default(), &mut pop, &mut woa_rng, Stage::Woa, Some(i_woa));
        }
        if i_aha > 0 && !runner.budget.exhausted() {
            runner.switch(&mut pop, Stage::Aha);
            runner.run_stage(&mut Aha::new(pop.len()), &mut pop, &mut aha_rng, Stage::Aha, Some(i_aha));
        }
        if !runner.budget.exhausted() {
            runner.switch(&mut pop, Stage::Cma);
            let mean = match runner.budget.best() {
                Some((x, _)) => x.to_vec(),
                None => pop.positions[pop.best_index()].clone(),
            };
            let mut cma = Cma::new(mean, bounds, pop.len(), cfg.cma);
            runner.run_stage(&mut cma, &mut pop, &mut cma_rng, Stage::Cma, None);
        }
        meta += 1;
    }
    log::debug!("EEA finished after {meta} meta-iterations");
    Ok(runner.budget.into_trace("EEA", seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stagnation_semantics() {
        assert!(detect_stagnation(&[5.0, 5.0, 5.0], 1e-6));
        assert!(!detect_stagnation(&[100.0, 90.0, 81.0], 1e-6));
        assert!(!detect_stagnation(&[100.0, 99.9999], 1e-6));
        assert!(detect_stagnation(&[100.0, 99.99999], 1e-6));
        assert!(!detect_stagnation(&[-100.0, -110.0], 1e-6));
        assert!(!detect_stagnation(&[f64::INFINITY, 3.0], 1e-6));
        assert!(detect_stagnation(&[f64::INFINITY, f64::INFINITY], 1e-6));
        assert!(!detect_stagnation(&[5.0, 5.0], 0.0));
    }

    #[test]
    fn stage_caps_round() {
        let c = EnsembleConfig::default();
        assert_eq!(c.stage_caps(399), (120, 120));
        assert_eq!(c.stage_caps(39), (12, 12));
    }

    #[test]
    fn config_validation() {
        let mut c = EnsembleConfig::default();
        assert!(c.validate().is_ok());
        c.woa_fraction = 0.8;
        assert!(c.validate().is_err());
        let c = EnsembleConfig { omega: -1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
