//! Environmental loading and hydrodynamic coefficient providers.
//!
//! Everything here is a pure function of its inputs; a [`PhysicsConfig`]
//! carries the physical constants and the platform parameters shared with
//! the [`crate::dynamics`] module.

mod config;
mod hydro;
mod site;
mod spectra;

pub use config::PhysicsConfig;
pub use hydro::{platform_hydro, sphere_hydro, HydroCoeffs, PlatformCoeffs, SPHERE_RADIUS_RANGE};
pub use site::{
    bundled_site, generate_site, load_site, parse_site, save_site, site_to_csv, SeaState, SiteParams,
    SiteScatter, BUNDLED_SITES,
};
pub use spectra::{jonswap_spectrum, kaimal_spectrum};

use crate::{Error, Result};

/// Angular frequency discretisation shared by spectra, coefficients and the
/// response integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::Config(format!(
                "frequency grid needs at least 2 points, got {}",
                omegas.len()
            )));
        }
        if !(omegas[0] > 0.0) {
            return Err(Error::Config(format!(
                "frequency grid must start above zero, got {}",
                omegas[0]
            )));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("frequency grid contains non-finite values".into()));
        }
        if omegas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("frequency grid must be strictly increasing".into()));
        }
        Ok(Self { omegas })
    }

    /// `n` points uniformly spaced on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("frequency grid needs at least 2 points, got {n}")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        Self::new((0..n).map(|i| lo + step * i as f64).collect())
    }

    /// `n` points log-spaced on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo > 0.0) {
            return Err(Error::Config(format!(
                "log grid needs n >= 2 and lo > 0, got n = {n}, lo = {lo}"
            )));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        Self::new((0..n).map(|i| (a + step * i as f64).exp()).collect())
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Trapezoid quadrature weights, so that `sum(w[i] * f[i])` integrates `f`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let w = &self.omegas;
        let n = w.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { w[i] - w[i - 1] } else { 0.0 };
                let right = if i + 1 < n { w[i + 1] - w[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }

    /// Trapezoid integral of samples taken on this grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.omegas.len());
        self.omegas
            .windows(2)
            .zip(values.windows(2))
            .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
            .sum()
    }
}

impl Default for FrequencyGrid {
    /// 120 points uniformly spaced on [0.1, 3.0] rad/s.
    fn default() -> Self {
        Self::uniform(0.1, 3.0, 120).expect("default grid is valid")
    }
}

/// Deep-water wavenumber.
#[inline]
pub fn wavenumber(omega: f64, g: f64) -> f64 {
    omega * omega / g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(FrequencyGrid::new(vec![1.0]).is_err());
        assert!(FrequencyGrid::new(vec![0.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![2.0, 1.0]).is_err());
        assert!(FrequencyGrid::uniform(0.1, 3.0, 1).is_err());
    }

    #[test]
    fn trapezoid_weights_match_integrate() {
        let grid = FrequencyGrid::log_spaced(0.05, 4.0, 37).unwrap();
        let f: Vec<f64> = grid.omegas().iter().map(|w| w.sin() + w * w).collect();
        let by_weights: f64 = grid.trapezoid_weights().iter().zip(&f).map(|(w, v)| w * v).sum();
        assert!((by_weights - grid.integrate(&f)).abs() < 1e-12);
    }

    #[test]
    fn default_grid_shape() {
        let grid = FrequencyGrid::default();
        assert_eq!(grid.len(), 120);
        assert_eq!(grid.omegas()[0], 0.1);
        assert!((grid.omegas()[119] - 3.0).abs() < 1e-12);
    }
}
