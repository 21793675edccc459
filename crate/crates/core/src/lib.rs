//! Hybrid floating wind / wave energy converter platform model and the
//! optimizers used to tune it.
//!
//! The crate is organised bottom-up:
//!
//! - [`environment`]: wave and wind spectra, surrogate hydrodynamic
//!   coefficients, site scatter tables.
//! - [`dynamics`]: the linearised frequency-domain six degree-of-freedom
//!   system (platform surge, heave, pitch and three heaving spheres) solved
//!   with iterative statistical linearisation of quadratic drag.
//! - [`objectives`]: annual power, nacelle acceleration and power-loss
//!   measures for a design vector over a site.
//! - [`optimizers`]: nine bound-constrained metaheuristics behind one
//!   seeded `minimize` entry point.
//! - [`ensemble`]: the staged WOA / AHA / CMA-ES ensemble with novelty
//!   injection and log-space discretisation.
//! - [`harness`]: multi-seed experiments, landscape scans, reports.

pub mod dynamics;
pub mod ensemble;
pub mod environment;
mod error;
pub mod harness;
pub mod objectives;
pub mod optimizers;

pub use error::{Error, Result};
