//! Linearised frequency-domain dynamics of the hybrid platform.
//!
//! Degrees of freedom, in order: platform surge, heave and pitch about the
//! centre of gravity, then the heave of the three spheres. Each sphere is
//! tied to the platform through a spring-damper PTO acting on the relative
//! vertical motion `q_w - q_heave + x_w * q_pitch`. Rotor dynamics enter only
//! as a constant aerodynamic damping and a thrust load driven by the
//! turbulent wind.

mod linalg;
mod linearize;
mod system;

pub use linearize::{isolated_fowt, isolated_wec, linearize, IsolatedWec, LinearizeOptions, Linearized};
pub use system::{HybridSystem, ModelContext, Spectra, SystemMatrices};

use serde::{Deserialize, Serialize};

use crate::environment::PhysicsConfig;
use crate::{Error, Result};

pub const NDOF: usize = 6;
pub const SURGE: usize = 0;
pub const HEAVE: usize = 1;
pub const PITCH: usize = 2;
/// Index of the first sphere; spheres occupy `WEC0..WEC0 + 3`.
pub const WEC0: usize = 3;

/// Angular positions of the spheres around the platform centre, degrees.
/// Waves travel along +x, so spheres 2 and 3 mirror each other.
pub const WEC_ANGLES_DEG: [f64; 3] = [0.0, 120.0, 240.0];

/// Placement of the three spheres and the turbine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Platform centre to sphere centre distance, m.
    pub distance: f64,
    /// Sphere radius, m.
    pub radius: f64,
    pub wec_x: [f64; 3],
    pub wec_y: [f64; 3],
    /// Nacelle height, m.
    pub z_wt: f64,
    /// Platform centre of gravity height, m.
    pub z_cg: f64,
}

impl Geometry {
    pub fn new(distance: f64, radius: f64, cfg: &PhysicsConfig) -> Result<Self> {
        if !(distance.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(Error::Domain(format!("invalid geometry L = {distance}, a = {radius}")));
        }
        if distance - radius < cfg.clearance {
            return Err(Error::Domain(format!(
                "L - a = {} m is below the {} m clearance",
                distance - radius,
                cfg.clearance
            )));
        }
        let mut wec_x = [0.0; 3];
        let mut wec_y = [0.0; 3];
        for (j, deg) in WEC_ANGLES_DEG.iter().enumerate() {
            let t = deg.to_radians();
            wec_x[j] = distance * t.cos();
            wec_y[j] = distance * t.sin();
        }
        // Spheres 2 and 3 share x exactly so the mirror symmetry is exact.
        wec_x[2] = wec_x[1];
        Ok(Self {
            distance,
            radius,
            wec_x,
            wec_y,
            z_wt: cfg.z_wt,
            z_cg: cfg.z_cg,
        })
    }

    pub fn nacelle_lever(&self) -> f64 {
        self.z_wt - self.z_cg
    }
}

/// PTO spring and damper shared by the three spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtoSetting {
    /// Stiffness, N/m.
    pub k_pto: f64,
    /// Damping, N s/m.
    pub b_pto: f64,
}

impl PtoSetting {
    /// Admissible range of both coefficients in a design vector.
    pub const DESIGN_RANGE: (f64, f64) = (1e1, 1e10);

    pub fn new(k_pto: f64, b_pto: f64) -> Result<Self> {
        if !(k_pto >= 0.0 && b_pto >= 0.0 && k_pto.is_finite() && b_pto.is_finite()) {
            return Err(Error::Domain(format!("PTO coefficients must be non-negative, got k = {k_pto}, b = {b_pto}")));
        }
        Ok(Self { k_pto, b_pto })
    }

    pub fn zero() -> Self {
        Self { k_pto: 0.0, b_pto: 0.0 }
    }

    pub fn within_design_range(&self) -> bool {
        let (lo, hi) = Self::DESIGN_RANGE;
        (lo..=hi).contains(&self.k_pto) && (lo..=hi).contains(&self.b_pto)
    }
}

/// Response standard deviations for one sea state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResponseStats {
    /// Displacement std per DOF (m for translations, rad for pitch).
    pub sigma_q: [f64; NDOF],
    /// Velocity std per DOF.
    pub sigma_vel: [f64; NDOF],
    /// Std of the sphere-to-platform relative velocity, m/s.
    pub sigma_relvel: [f64; 3],
    /// Std of the horizontal nacelle acceleration, m/s^2.
    pub sigma_nacelle: f64,
}

impl ResponseStats {
    pub fn is_finite(&self) -> bool {
        self.sigma_q.iter().chain(&self.sigma_vel).chain(&self.sigma_relvel).all(|v| v.is_finite())
            && self.sigma_nacelle.is_finite()
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.sigma_q
            .iter()
            .chain(&self.sigma_vel)
            .chain(&self.sigma_relvel)
            .copied()
            .chain(std::iter::once(self.sigma_nacelle))
    }

    /// Largest relative change between two iterates.
    pub fn max_relative_change(&self, previous: &ResponseStats) -> f64 {
        self.values()
            .zip(previous.values())
            .map(|(a, b)| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}
