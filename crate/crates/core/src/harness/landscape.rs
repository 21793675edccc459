use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::PtoSetting;
use crate::objectives::{weighted_sum, DesignVector, LossForm, SiteModel};
use crate::{Error, Result};

/// `n` points spaced evenly in `log10` between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl LogAxis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
            return Err(Error::Config(format!("invalid log axis [{lo}, {hi}] with {n} points")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.log10(), self.hi.log10());
        (0..self.n)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (self.n - 1) as f64))
            .collect()
    }
}

impl Default for LogAxis {
    fn default() -> Self {
        let (lo, hi) = PtoSetting::DESIGN_RANGE;
        Self { lo, hi, n: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeCell {
    pub k_pto: f64,
    pub b_pto: f64,
    pub annual_power: f64,
    pub nacelle_ratio: f64,
    pub power_loss: f64,
}

/// Evaluates one shared PTO pair per grid cell with the geometry fixed.
/// Rows run over `k` outer and `b` inner.
pub fn landscape(
    model: &SiteModel,
    distance: f64,
    radius: f64,
    k_axis: &LogAxis,
    b_axis: &LogAxis,
    form: LossForm,
) -> Result<Vec<LandscapeCell>> {
    let iso_nacelle = model.isolated_nacelle();
    if !(iso_nacelle > 0.0) {
        return Err(Error::Domain("isolated nacelle acceleration is zero".into()));
    }
    let cells: Vec<(f64, f64)> = k_axis
        .points()
        .into_iter()
        .flat_map(|k| b_axis.points().into_iter().map(move |b| (k, b)))
        .collect();
    cells
        .par_iter()
        .map(|&(k, b)| {
            let d = DesignVector::uniform(distance, radius, PtoSetting { k_pto: k, b_pto: b }, model.n_states());
            let r = model.respond(&d)?;
            let power = weighted_sum(model.occurrences(), &r.power);
            let nacelle = weighted_sum(model.occurrences(), &r.nacelle);
            let isolated = model.isolated_power(&d)?;
            let loss = if power > 0.0 {
                match form {
                    LossForm::Log => (isolated / power).log10(),
                    LossForm::Ratio => isolated / power,
                }
            } else {
                f64::INFINITY
            };
            Ok(LandscapeCell {
                k_pto: k,
                b_pto: b,
                annual_power: power,
                nacelle_ratio: nacelle / iso_nacelle,
                power_loss: loss,
            })
        })
        .collect()
}

pub fn landscape_csv(cells: &[LandscapeCell]) -> String {
    let mut s = String::from("k_pto,b_pto,annual_power,nacelle_ratio,power_loss\n");
    for c in cells {
        writeln!(s, "{},{},{},{},{}", c.k_pto, c.b_pto, c.annual_power, c.nacelle_ratio, c.power_loss).unwrap();
    }
    s
}
