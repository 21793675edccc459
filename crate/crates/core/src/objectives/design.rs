use serde::{Deserialize, Serialize};

use crate::dynamics::PtoSetting;
use crate::ensemble::{decode_log, encode_log};
use crate::optimizers::Bounds;
use crate::{Error, Result};

/// Allowed platform-to-sphere distance, m.
pub const DISTANCE_RANGE: (f64, f64) = (20.0, 50.0);
/// Allowed sphere radius when it is a design variable, m.
pub const RADIUS_RANGE: (f64, f64) = (2.0, 10.0);
pub const DEFAULT_RADIUS: f64 = 5.0;

/// Distance, radius and the per-sea-state PTO settings shared by the three
/// spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub distance: f64,
    pub radius: f64,
    pub pto: Vec<PtoSetting>,
}

impl DesignVector {
    /// Same PTO pair in each of `n` sea states.
    pub fn uniform(distance: f64, radius: f64, pto: PtoSetting, n: usize) -> Self {
        Self {
            distance,
            radius,
            pto: vec![pto; n],
        }
    }

    pub fn mean_k(&self) -> f64 {
        self.pto.iter().map(|p| p.k_pto).sum::<f64>() / self.pto.len() as f64
    }

    pub fn mean_b(&self) -> f64 {
        self.pto.iter().map(|p| p.b_pto).sum::<f64>() / self.pto.len() as f64
    }
}

/// A design coordinate that is either searched within a range or held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Param {
    Free { lo: f64, hi: f64 },
    Fixed(f64),
}

impl Param {
    fn is_free(&self) -> bool {
        matches!(self, Param::Free { .. })
    }

    fn admits(&self, v: f64) -> bool {
        match *self {
            Param::Free { lo, hi } => v >= lo && v <= hi,
            Param::Fixed(x) => v == x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    Fixed,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PtoMode {
    /// One PTO pair per sea state.
    PerState,
    /// One PTO pair applied in every sea state.
    Shared,
}

/// Maps design vectors to optimizer working space: free distance and
/// radius pass through linearly, then all stiffnesses and all dampings as
/// base-10 exponents in `[1, 10]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpace {
    pub distance: Param,
    pub radius: Param,
    pub pto: PtoMode,
    pub n_states: usize,
    /// Minimum `L - a`, m. Decoding lifts `L` to respect it.
    pub clearance: f64,
}

impl DesignSpace {
    pub fn new(radius: RadiusMode, pto: PtoMode, n_states: usize, clearance: f64) -> Self {
        let radius = match radius {
            RadiusMode::Fixed => Param::Fixed(DEFAULT_RADIUS),
            RadiusMode::Free => Param::Free {
                lo: RADIUS_RANGE.0,
                hi: RADIUS_RANGE.1,
            },
        };
        Self {
            distance: Param::Free {
                lo: DISTANCE_RANGE.0,
                hi: DISTANCE_RANGE.1,
            },
            radius,
            pto,
            n_states,
            clearance,
        }
    }

    /// Fixed geometry and one shared PTO pair: a two-dimensional space.
    pub fn shared_pto(distance: f64, radius: f64, n_states: usize, clearance: f64) -> Self {
        Self {
            distance: Param::Fixed(distance),
            radius: Param::Fixed(radius),
            pto: PtoMode::Shared,
            n_states,
            clearance,
        }
    }

    fn pto_pairs(&self) -> usize {
        match self.pto {
            PtoMode::PerState => self.n_states,
            PtoMode::Shared => 1,
        }
    }

    fn offset(&self) -> usize {
        self.distance.is_free() as usize + self.radius.is_free() as usize
    }

    pub fn dim(&self) -> usize {
        self.offset() + 2 * self.pto_pairs()
    }

    pub fn log_dims(&self) -> Vec<usize> {
        (self.offset()..self.dim()).collect()
    }

    pub fn bounds(&self) -> Bounds {
        let (plo, phi) = PtoSetting::DESIGN_RANGE;
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for p in [self.distance, self.radius] {
            if let Param::Free { lo: l, hi: h } = p {
                lo.push(l);
                hi.push(h);
            }
        }
        for _ in 0..2 * self.pto_pairs() {
            lo.push(plo.log10());
            hi.push(phi.log10());
        }
        Bounds::new(lo, hi).expect("design bounds are well formed")
    }

    pub fn decode(&self, x: &[f64]) -> DesignVector {
        let mut i = 0;
        let mut take = |p: Param| match p {
            Param::Free { .. } => {
                i += 1;
                x[i - 1]
            }
            Param::Fixed(v) => v,
        };
        let mut distance = take(self.distance);
        let radius = take(self.radius);
        if self.distance.is_free() && self.radius.is_free() {
            distance = distance.max(radius + self.clearance);
        }
        let m = self.pto_pairs();
        let off = self.offset();
        let pairs: Vec<PtoSetting> = (0..m)
            .map(|j| PtoSetting {
                k_pto: decode_log(x[off + j]),
                b_pto: decode_log(x[off + m + j]),
            })
            .collect();
        let pto = match self.pto {
            PtoMode::PerState => pairs,
            PtoMode::Shared => vec![pairs[0]; self.n_states],
        };
        DesignVector { distance, radius, pto }
    }

    pub fn encode(&self, d: &DesignVector) -> Result<Vec<f64>> {
        self.validate(d)?;
        let mut x = Vec::with_capacity(self.dim());
        if self.distance.is_free() {
            x.push(d.distance);
        }
        if self.radius.is_free() {
            x.push(d.radius);
        }
        let m = self.pto_pairs();
        for p in &d.pto[..m] {
            x.push(encode_log(p.k_pto)?);
        }
        for p in &d.pto[..m] {
            x.push(encode_log(p.b_pto)?);
        }
        Ok(x)
    }

    /// Checks ranges and lengths; optimizers must clamp before evaluation.
    pub fn validate(&self, d: &DesignVector) -> Result<()> {
        if d.pto.len() != self.n_states {
            return Err(Error::Domain(format!(
                "design has {} PTO pairs for {} sea states",
                d.pto.len(),
                self.n_states
            )));
        }
        if !self.distance.admits(d.distance) {
            return Err(Error::Domain(format!("distance {} outside {:?}", d.distance, self.distance)));
        }
        if !self.radius.admits(d.radius) {
            return Err(Error::Domain(format!("radius {} outside {:?}", d.radius, self.radius)));
        }
        let (lo, hi) = PtoSetting::DESIGN_RANGE;
        let tol = 1e-9;
        for (i, p) in d.pto.iter().enumerate() {
            let ok = |v: f64| v >= lo * (1.0 - tol) && v <= hi * (1.0 + tol);
            if !ok(p.k_pto) || !ok(p.b_pto) {
                return Err(Error::Domain(format!(
                    "PTO pair {i} (k = {}, b = {}) outside [{lo:e}, {hi:e}]",
                    p.k_pto, p.b_pto
                )));
            }
        }
        if self.pto == PtoMode::Shared && d.pto.iter().any(|p| *p != d.pto[0]) {
            return Err(Error::Domain("shared-PTO design has differing pairs".into()));
        }
        Ok(())
    }
}
