//! Site-level objectives for a hybrid design.

mod design;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    isolated_fowt, isolated_wec, linearize, Geometry, LinearizeOptions, Linearized, ModelContext, PtoSetting,
    ResponseStats, Spectra,
};
use crate::environment::{FrequencyGrid, PhysicsConfig, SiteScatter};
use crate::optimizers::{Bounds, Objective};
use crate::{Error, Result};

pub use design::{
    DesignSpace, DesignVector, Param, PtoMode, RadiusMode, DEFAULT_RADIUS, DISTANCE_RANGE, RADIUS_RANGE,
};

/// Power absorbed by the three PTOs in one sea state, W.
pub fn seastate_power(pto: &PtoSetting, stats: &ResponseStats) -> f64 {
    stats.sigma_relvel.iter().map(|s| pto.b_pto * s * s).sum()
}

/// Occurrence-weighted sum in table order.
pub fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).fold(0.0, |acc, (w, v)| acc + w * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossForm {
    /// `log10(P_isolated / P_hybrid)`.
    #[default]
    Log,
    /// `P_isolated / P_hybrid`.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    AnnualPower,
    NacelleAccel,
    PowerLoss(LossForm),
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::AnnualPower => "annual_power",
            ObjectiveKind::NacelleAccel => "nacelle_accel",
            ObjectiveKind::PowerLoss(_) => "power_loss",
        }
    }

    pub fn maximize(&self) -> bool {
        matches!(self, ObjectiveKind::AnnualPower)
    }

    /// Minimisation fitness for an objective value.
    pub fn fitness(&self, value: f64) -> f64 {
        if self.maximize() {
            -value
        } else {
            value
        }
    }

    /// Objective value recovered from a fitness.
    pub fn value(&self, fitness: f64) -> f64 {
        self.fitness(fitness)
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "annual_power" | "power" => Ok(ObjectiveKind::AnnualPower),
            "nacelle_accel" | "nacelle" => Ok(ObjectiveKind::NacelleAccel),
            "power_loss" | "power_loss_log" => Ok(ObjectiveKind::PowerLoss(LossForm::Log)),
            "power_loss_ratio" => Ok(ObjectiveKind::PowerLoss(LossForm::Ratio)),
            other => Err(Error::Config(format!("unknown objective '{other}'"))),
        }
    }
}

/// Per-state hybrid results for one design.
#[derive(Debug, Clone)]
pub struct SiteResponse {
    pub power: Vec<f64>,
    pub nacelle: Vec<f64>,
    pub linearized: Vec<Linearized>,
}

impl SiteResponse {
    pub fn unconverged(&self) -> usize {
        self.linearized.iter().filter(|l| !l.converged).count()
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub index: usize,
    pub design: DesignVector,
    pub fitness: f64,
    pub failed: bool,
    pub state_power: Vec<f64>,
    pub state_nacelle: Vec<f64>,
    pub unconverged: usize,
    pub wall_time: f64,
}

impl EvaluationRecord {
    pub fn csv_header(n_states: usize) -> String {
        let mut cols = vec!["eval_index".to_string(), "fitness".into(), "L".into(), "a".into()];
        cols.extend((1..=n_states).map(|i| format!("k_{i}")));
        cols.extend((1..=n_states).map(|i| format!("b_{i}")));
        cols.push("flags".into());
        cols.join(",")
    }

    /// `flags` is `failed` or the number of unconverged states.
    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.index.to_string(),
            self.fitness.to_string(),
            self.design.distance.to_string(),
            self.design.radius.to_string(),
        ];
        cols.extend(self.design.pto.iter().map(|p| p.k_pto.to_string()));
        cols.extend(self.design.pto.iter().map(|p| p.b_pto.to_string()));
        cols.push(if self.failed { "failed".into() } else { self.unconverged.to_string() });
        cols.join(",")
    }
}

/// A site with cached spectra and isolated-platform responses.
pub struct SiteModel {
    ctx: ModelContext,
    site: SiteScatter,
    spectra: Vec<Spectra>,
    isolated: Vec<Linearized>,
    weights: Vec<f64>,
    opts: LinearizeOptions,
    counter: AtomicUsize,
}

impl SiteModel {
    pub fn new(cfg: PhysicsConfig, grid: FrequencyGrid, site: SiteScatter, opts: LinearizeOptions) -> Result<Self> {
        opts.validate()?;
        let ctx = ModelContext::new(cfg, grid)?;
        let spectra: Vec<Spectra> = site.states().iter().map(|s| ctx.spectra(s)).collect();
        let isolated = spectra
            .par_iter()
            .map(|sp| isolated_fowt(&ctx, sp, &opts))
            .collect::<Result<Vec<_>>>()?;
        let weights = site.states().iter().map(|s| s.occurrence).collect();
        Ok(Self {
            ctx,
            site,
            spectra,
            isolated,
            weights,
            opts,
            counter: AtomicUsize::new(0),
        })
    }

    pub fn context(&self) -> &ModelContext {
        &self.ctx
    }

    pub fn site(&self) -> &SiteScatter {
        &self.site
    }

    pub fn spectra(&self) -> &[Spectra] {
        &self.spectra
    }

    pub fn options(&self) -> &LinearizeOptions {
        &self.opts
    }

    pub fn n_states(&self) -> usize {
        self.site.len()
    }

    pub fn occurrences(&self) -> &[f64] {
        &self.weights
    }

    /// Number of [`SiteModel::evaluate`] calls so far.
    pub fn evaluations(&self) -> usize {
        self.counter.load(Ordering::Relaxed)
    }

    /// Isolated-platform responses per state.
    pub fn isolated_platform(&self) -> &[Linearized] {
        &self.isolated
    }

    fn check(&self, d: &DesignVector) -> Result<()> {
        if d.pto.len() != self.n_states() {
            return Err(Error::Domain(format!(
                "design has {} PTO pairs, site '{}' has {} states",
                d.pto.len(),
                self.site.name,
                self.n_states()
            )));
        }
        Ok(())
    }

    fn geometry(&self, d: &DesignVector) -> Result<Geometry> {
        Geometry::new(d.distance, d.radius, self.ctx.config())
    }

    /// Linearised hybrid response in every state.
    pub fn respond(&self, d: &DesignVector) -> Result<SiteResponse> {
        self.check(d)?;
        let sys = self.ctx.system(self.geometry(d)?)?;
        let linearized = self
            .spectra
            .par_iter()
            .zip(&d.pto)
            .map(|(sp, pto)| linearize(&sys, pto, sp, &self.opts))
            .collect::<Result<Vec<_>>>()?;
        let power = linearized.iter().zip(&d.pto).map(|(l, p)| seastate_power(p, &l.stats)).collect();
        let nacelle = linearized.iter().map(|l| l.stats.sigma_nacelle).collect();
        Ok(SiteResponse {
            power,
            nacelle,
            linearized,
        })
    }

    pub fn annual_power(&self, d: &DesignVector) -> Result<f64> {
        Ok(weighted_sum(&self.weights, &self.respond(d)?.power))
    }

    pub fn annual_nacelle(&self, d: &DesignVector) -> Result<f64> {
        Ok(weighted_sum(&self.weights, &self.respond(d)?.nacelle))
    }

    /// Annual nacelle acceleration of the platform without spheres.
    pub fn isolated_nacelle(&self) -> f64 {
        let s: Vec<f64> = self.isolated.iter().map(|l| l.stats.sigma_nacelle).collect();
        weighted_sum(&self.weights, &s)
    }

    /// Annual power of three stand-alone spheres with the design's PTO.
    pub fn isolated_power(&self, d: &DesignVector) -> Result<f64> {
        self.check(d)?;
        let sys = self.ctx.system(self.geometry(d)?)?;
        let p = self
            .spectra
            .par_iter()
            .zip(&d.pto)
            .map(|(sp, pto)| isolated_wec(&sys, pto, sp, &self.opts).map(|w| 3.0 * w.power))
            .collect::<Result<Vec<_>>>()?;
        Ok(weighted_sum(&self.weights, &p))
    }

    pub fn power_loss(&self, d: &DesignVector, form: LossForm) -> Result<f64> {
        let hybrid = self.annual_power(d)?;
        let isolated = self.isolated_power(d)?;
        Ok(loss_value(isolated, hybrid, form))
    }

    pub fn nacelle_ratio(&self, d: &DesignVector) -> Result<f64> {
        let den = self.isolated_nacelle();
        if !(den > 0.0) {
            return Err(Error::Domain("isolated nacelle acceleration is zero".into()));
        }
        Ok(self.annual_nacelle(d)? / den)
    }

    /// Fitness record for one design; numerical failures yield a failed
    /// record with infinite fitness.
    pub fn evaluate(&self, d: &DesignVector, kind: ObjectiveKind) -> Result<EvaluationRecord> {
        self.check(d)?;
        let start = Instant::now();
        let index = self.counter.fetch_add(1, Ordering::Relaxed);
        let outcome = self.respond(d).and_then(|r| {
            let value = match kind {
                ObjectiveKind::AnnualPower => weighted_sum(&self.weights, &r.power),
                ObjectiveKind::NacelleAccel => weighted_sum(&self.weights, &r.nacelle),
                ObjectiveKind::PowerLoss(form) => {
                    let hybrid = weighted_sum(&self.weights, &r.power);
                    loss_value(self.isolated_power(d)?, hybrid, form)
                }
            };
            Ok((r, value))
        });
        let record = match outcome {
            Ok((r, value)) => {
                let fitness = kind.fitness(value);
                EvaluationRecord {
                    index,
                    design: d.clone(),
                    failed: fitness.is_nan() || fitness == f64::INFINITY,
                    fitness: if fitness.is_nan() { f64::INFINITY } else { fitness },
                    unconverged: r.unconverged(),
                    state_power: r.power,
                    state_nacelle: r.nacelle,
                    wall_time: 0.0,
                }
            }
            Err(e @ Error::Domain(_)) => return Err(e),
            Err(e) => {
                log::warn!("evaluation {index} failed: {e}");
                EvaluationRecord {
                    index,
                    design: d.clone(),
                    fitness: f64::INFINITY,
                    failed: true,
                    state_power: Vec::new(),
                    state_nacelle: Vec::new(),
                    unconverged: 0,
                    wall_time: 0.0,
                }
            }
        };
        Ok(EvaluationRecord {
            wall_time: start.elapsed().as_secs_f64(),
            ..record
        })
    }
}

fn loss_value(isolated: f64, hybrid: f64, form: LossForm) -> f64 {
    if !(hybrid > 0.0) {
        log::warn!("hybrid power is zero, power loss set to +inf");
        return f64::INFINITY;
    }
    match form {
        LossForm::Log => (isolated / hybrid).log10(),
        LossForm::Ratio => isolated / hybrid,
    }
}

/// Optimizer view of a site objective in working coordinates.
pub struct DesignProblem<'m> {
    model: &'m SiteModel,
    space: DesignSpace,
    kind: ObjectiveKind,
}

impl<'m> DesignProblem<'m> {
    pub fn new(model: &'m SiteModel, space: DesignSpace, kind: ObjectiveKind) -> Result<Self> {
        if space.n_states != model.n_states() {
            return Err(Error::Config(format!(
                "design space covers {} states, site has {}",
                space.n_states,
                model.n_states()
            )));
        }
        Ok(Self { model, space, kind })
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn model(&self) -> &SiteModel {
        self.model
    }

    pub fn bounds(&self) -> Bounds {
        self.space.bounds()
    }

    pub fn record(&self, x: &[f64]) -> Result<EvaluationRecord> {
        let d = self.space.decode(x);
        self.space.validate(&d)?;
        self.model.evaluate(&d, self.kind)
    }
}

impl Objective for DesignProblem<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        match self.record(x) {
            Ok(r) => r.fitness,
            Err(e) => {
                log::warn!("rejected design: {e}");
                f64::INFINITY
            }
        }
    }

    fn log_dims(&self) -> Vec<usize> {
        self.space.log_dims()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seastate_power_substitution() {
        let mut stats = ResponseStats::default();
        stats.sigma_relvel = [0.1; 3];
        let p = seastate_power(&PtoSetting { k_pto: 1e3, b_pto: 1e6 }, &stats);
        assert!((p - 3.0e4).abs() < 1e-9);
        assert_eq!(seastate_power(&PtoSetting::zero(), &stats), 0.0);
    }

    #[test]
    fn weighted_mean() {
        assert_eq!(weighted_sum(&[0.25, 0.75], &[4e4, 8e4]), 7e4);
        assert_eq!(weighted_sum(&[1.0], &[5.0]), 5.0);
    }

    #[test]
    fn loss_forms() {
        assert_eq!(loss_value(2.0, 2.0, LossForm::Log), 0.0);
        assert_eq!(loss_value(2.0, 2.0, LossForm::Ratio), 1.0);
        assert!((loss_value(1.0, 10.0, LossForm::Log) + 1.0).abs() < 1e-15);
        assert_eq!(loss_value(1.0, 0.0, LossForm::Log), f64::INFINITY);
    }

    #[test]
    fn kind_parsing_and_sign() {
        assert_eq!("annual_power".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::AnnualPower);
        assert_eq!(
            "power_loss_ratio".parse::<ObjectiveKind>().unwrap(),
            ObjectiveKind::PowerLoss(LossForm::Ratio)
        );
        assert!("lcoe".parse::<ObjectiveKind>().is_err());
        assert_eq!(ObjectiveKind::AnnualPower.fitness(5.0), -5.0);
        assert_eq!(ObjectiveKind::NacelleAccel.fitness(5.0), 5.0);
    }

    #[test]
    fn csv_layout() {
        assert_eq!(EvaluationRecord::csv_header(2), "eval_index,fitness,L,a,k_1,k_2,b_1,b_2,flags");
        let r = EvaluationRecord {
            index: 3,
            design: DesignVector::uniform(20.0, 5.0, PtoSetting { k_pto: 10.0, b_pto: 100.0 }, 2),
            fitness: -1.5,
            failed: false,
            state_power: vec![],
            state_nacelle: vec![],
            unconverged: 1,
            wall_time: 0.0,
        };
        assert_eq!(r.csv_row(), "3,-1.5,20,5,10,10,100,100,1");
    }
}
