//! Surrogate hydrodynamic coefficients.
//!
//! The sphere model keeps the properties the optimiser relies on: positive
//! radiation damping, the correct long-wave limits and Haskind reciprocity
//! between excitation and damping. Multi-body interaction between the
//! spheres and the platform is not modelled.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{wavenumber, FrequencyGrid, PhysicsConfig};
use crate::{Error, Result};

/// Admissible sphere radii, m.
pub const SPHERE_RADIUS_RANGE: (f64, f64) = (0.5, 15.0);

/// Heave coefficients of one floating body, per grid frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroCoeffs {
    pub omegas: Vec<f64>,
    /// kg
    pub added_mass: Vec<f64>,
    /// N s/m
    pub radiation_damping: Vec<f64>,
    /// Complex heave force per unit wave amplitude at the body centre, N/m.
    pub excitation: Vec<Complex64>,
    /// N/m
    pub hydrostatic_stiffness: f64,
    /// kg
    pub mass: f64,
}

/// Half-submerged, neutrally buoyant heaving sphere of radius `a`.
pub fn sphere_hydro(a: f64, grid: &FrequencyGrid, cfg: &PhysicsConfig) -> Result<HydroCoeffs> {
    let (lo, hi) = SPHERE_RADIUS_RANGE;
    if !(lo..=hi).contains(&a) {
        return Err(Error::Domain(format!("sphere radius {a} m outside [{lo}, {hi}]")));
    }
    let rho = cfg.rho_water;
    let g = cfg.g;
    let mass = 2.0 / 3.0 * PI * rho * a.powi(3);
    let k_hs = rho * g * PI * (a * a);

    let n = grid.len();
    let mut added_mass = Vec::with_capacity(n);
    let mut radiation_damping = Vec::with_capacity(n);
    let mut excitation = Vec::with_capacity(n);
    for &w in grid.omegas() {
        let ka = wavenumber(w, g) * a;
        let mu = cfg.sphere_added_mass_high
            + (cfg.sphere_added_mass_low - cfg.sphere_added_mass_high) / (1.0 + cfg.sphere_added_mass_rate * ka);
        added_mass.push(mu * mass);
        // Low-frequency slope 3*pi/4*ka is what Haskind requires for the
        // excitation to tend to the hydrostatic force.
        let nu = 0.75 * PI * ka * (-cfg.sphere_damping_decay * ka).exp();
        let b = mass * w * nu;
        radiation_damping.push(b);
        excitation.push(Complex64::new(haskind_excitation(b, w, rho, g), 0.0));
    }
    Ok(HydroCoeffs {
        omegas: grid.omegas().to_vec(),
        added_mass,
        radiation_damping,
        excitation,
        hydrostatic_stiffness: k_hs,
        mass,
    })
}

/// Excitation magnitude of an axisymmetric heaving body in deep water from
/// its radiation damping: `|X|^2 = 2 rho g^3 B / omega^3`.
pub(crate) fn haskind_excitation(damping: f64, omega: f64, rho: f64, g: f64) -> f64 {
    (2.0 * rho * g.powi(3) * damping / omega.powi(3)).sqrt()
}

/// Platform coefficients in the (surge, heave, pitch) block about the
/// centre of gravity.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformCoeffs {
    pub omegas: Vec<f64>,
    pub mass: [[f64; 3]; 3],
    pub added_mass: [[f64; 3]; 3],
    pub radiation_damping: [[f64; 3]; 3],
    pub hydrostatic_stiffness: [[f64; 3]; 3],
    pub mooring_stiffness: [[f64; 3]; 3],
    /// Generalised wave load per unit amplitude, per frequency.
    pub excitation: Vec<[Complex64; 3]>,
}

/// Constant-coefficient platform with a column-based excitation surrogate.
///
/// Waves travel along +x. Heave loads act on three offset columns at 60,
/// 180 and 300 degrees; the surge load is an inertia force acting at
/// `platform_surge_force_z`.
pub fn platform_hydro(grid: &FrequencyGrid, cfg: &PhysicsConfig) -> PlatformCoeffs {
    let m = cfg.platform_mass;
    let mass = [[m, 0.0, 0.0], [0.0, m, 0.0], [0.0, 0.0, cfg.platform_pitch_inertia]];
    let a15 = cfg.platform_added_mass_surge_pitch;
    let added_mass = [
        [cfg.platform_added_mass_surge, 0.0, a15],
        [0.0, cfg.platform_added_mass_heave, 0.0],
        [a15, 0.0, cfg.platform_added_mass_pitch],
    ];
    let radiation_damping = diag3(cfg.platform_damping_surge, cfg.platform_damping_heave, cfg.platform_damping_pitch);
    let hydrostatic_stiffness = diag3(0.0, cfg.platform_hs_heave, cfg.platform_hs_pitch);
    let k15 = cfg.moor_k15;
    let mooring_stiffness = [[cfg.moor_k11, 0.0, k15], [0.0, cfg.moor_k33, 0.0], [k15, 0.0, cfg.moor_k55]];

    let column_x: Vec<f64> = [60.0_f64, 180.0, 300.0]
        .iter()
        .map(|deg| cfg.platform_column_radius * deg.to_radians().cos())
        .collect();
    let lever = cfg.platform_surge_force_z - cfg.z_cg;
    let excitation = grid
        .omegas()
        .iter()
        .map(|&w| {
            let k = wavenumber(w, cfg.g);
            let per_column = cfg.platform_hs_heave / 3.0 * (-k * cfg.platform_heave_excitation_depth).exp();
            let mut heave = Complex64::new(0.0, 0.0);
            let mut pitch = Complex64::new(0.0, 0.0);
            for &x in &column_x {
                let f = per_column * Complex64::from_polar(1.0, -k * x);
                heave += f;
                pitch -= x * f;
            }
            let surge = Complex64::new(
                0.0,
                w * w * cfg.platform_surge_excitation_mass * (-k * cfg.platform_surge_excitation_depth).exp(),
            );
            pitch += lever * surge;
            [surge, heave, pitch]
        })
        .collect();

    PlatformCoeffs {
        omegas: grid.omegas().to_vec(),
        mass,
        added_mass,
        radiation_damping,
        hydrostatic_stiffness,
        mooring_stiffness,
        excitation,
    }
}

fn diag3(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]
}
