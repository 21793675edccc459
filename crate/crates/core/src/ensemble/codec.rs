use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Base-10 exponent of a strictly positive value.
pub fn encode_log(value: f64) -> Result<f64> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!("cannot log-encode {value}")));
    }
    Ok(value.log10())
}

pub fn decode_log(exponent: f64) -> f64 {
    10f64.powf(exponent)
}

/// Nearest multiple of `step`.
pub fn snap_value(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

/// Rounds the listed working-space dimensions to a grid of `step` decades.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSnap {
    pub dims: Vec<usize>,
    pub step: f64,
}

impl LogSnap {
    pub fn apply(&self, x: &mut [f64]) {
        for &d in &self.dims {
            x[d] = snap_value(x[d], self.step);
        }
    }
}
