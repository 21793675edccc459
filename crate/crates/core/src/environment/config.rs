use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants and platform parameters.
///
/// Serialised as a flat key-value document. Platform values are seeded from
/// the public OC4-DeepCwind semi-submersible definition; the drag and
/// mooring values are placeholders tuned only for qualitative behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Water density, kg/m^3.
    pub rho_water: f64,
    /// Gravitational acceleration, m/s^2.
    pub g: f64,
    /// Air density, kg/m^3.
    pub rho_air: f64,

    /// JONSWAP peak enhancement factor.
    pub jonswap_gamma: f64,
    /// Longitudinal turbulence intensity used by the Kaimal spectrum.
    pub turbulence_intensity: f64,
    /// Kaimal integral length scale, m.
    pub kaimal_length_scale: f64,

    /// Platform plus turbine mass, kg.
    pub platform_mass: f64,
    /// Pitch inertia about the centre of gravity, kg m^2.
    pub platform_pitch_inertia: f64,
    pub platform_added_mass_surge: f64,
    pub platform_added_mass_heave: f64,
    pub platform_added_mass_pitch: f64,
    pub platform_added_mass_surge_pitch: f64,
    pub platform_damping_surge: f64,
    pub platform_damping_heave: f64,
    pub platform_damping_pitch: f64,
    /// Heave hydrostatic stiffness, N/m.
    pub platform_hs_heave: f64,
    /// Pitch restoring stiffness including gravity, N m/rad.
    pub platform_hs_pitch: f64,
    /// Radius of the three offset columns, m.
    pub platform_column_radius: f64,
    /// Decay depth of the heave excitation, m.
    pub platform_heave_excitation_depth: f64,
    /// Inertia coefficient (displaced mass plus surge added mass) for the
    /// surge excitation, kg.
    pub platform_surge_excitation_mass: f64,
    /// Decay depth of the surge excitation, m.
    pub platform_surge_excitation_depth: f64,
    /// Vertical coordinate where the surge excitation acts, m.
    pub platform_surge_force_z: f64,

    pub moor_k11: f64,
    pub moor_k33: f64,
    pub moor_k55: f64,
    pub moor_k15: f64,

    /// Rotor thrust coefficient.
    pub aero_ct: f64,
    /// Rotor swept area, m^2.
    pub rotor_area: f64,

    /// Lumped quadratic drag, N s^2/m^2.
    pub cd_surge: f64,
    /// Lumped quadratic drag, N s^2/m^2.
    pub cd_heave: f64,
    /// Lumped quadratic drag, N m s^2.
    pub cd_pitch: f64,
    /// Dimensionless drag coefficient of a sphere; lumped as
    /// `0.5 * rho * cd_wec * pi * a^2`.
    pub cd_wec: f64,

    /// Nacelle height, m.
    #[serde(rename = "z_WT")]
    pub z_wt: f64,
    /// Platform centre of gravity height, m.
    pub z_cg: f64,
    /// Minimum gap between WEC surface and platform centre (`L - a`), m.
    pub clearance: f64,

    /// Sphere added mass coefficient at zero frequency.
    pub sphere_added_mass_low: f64,
    /// Sphere added mass coefficient at infinite frequency.
    pub sphere_added_mass_high: f64,
    /// Rate of the added-mass transition in `ka`.
    pub sphere_added_mass_rate: f64,
    /// Exponential decay rate of the sphere radiation damping in `ka`.
    pub sphere_damping_decay: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            rho_water: 1025.0,
            g: 9.81,
            rho_air: 1.225,
            jonswap_gamma: 3.3,
            turbulence_intensity: 0.14,
            kaimal_length_scale: 340.2,
            platform_mass: 1.4072e7,
            platform_pitch_inertia: 1.1e10,
            platform_added_mass_surge: 6.4e6,
            platform_added_mass_heave: 1.48e7,
            platform_added_mass_pitch: 7.17e9,
            platform_added_mass_surge_pitch: -5.0e6,
            platform_damping_surge: 1.0e5,
            platform_damping_heave: 1.0e5,
            platform_damping_pitch: 5.0e7,
            platform_hs_heave: 3.836e6,
            platform_hs_pitch: 9.1e8,
            platform_column_radius: 28.87,
            platform_heave_excitation_depth: 10.0,
            platform_surge_excitation_mass: 2.07e7,
            platform_surge_excitation_depth: 10.0,
            platform_surge_force_z: -10.0,
            moor_k11: 7.08e4,
            moor_k33: 1.91e4,
            moor_k55: 9.0e7,
            moor_k15: 0.0,
            aero_ct: 0.75,
            rotor_area: 12469.0,
            cd_surge: 4.0e5,
            cd_heave: 3.3e6,
            cd_pitch: 3.3e10,
            cd_wec: 0.5,
            z_wt: 90.0,
            z_cg: -9.89,
            clearance: 12.0,
            sphere_added_mass_low: 0.83,
            sphere_added_mass_high: 0.5,
            sphere_added_mass_rate: 1.5,
            sphere_damping_decay: 1.93,
        }
    }
}

impl PhysicsConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho_water", self.rho_water),
            ("g", self.g),
            ("rho_air", self.rho_air),
            ("jonswap_gamma", self.jonswap_gamma),
            ("kaimal_length_scale", self.kaimal_length_scale),
            ("platform_mass", self.platform_mass),
            ("platform_pitch_inertia", self.platform_pitch_inertia),
            ("rotor_area", self.rotor_area),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("turbulence_intensity", self.turbulence_intensity),
            ("platform_damping_surge", self.platform_damping_surge),
            ("platform_damping_heave", self.platform_damping_heave),
            ("platform_damping_pitch", self.platform_damping_pitch),
            ("platform_hs_heave", self.platform_hs_heave),
            ("platform_hs_pitch", self.platform_hs_pitch),
            ("moor_k11", self.moor_k11),
            ("moor_k33", self.moor_k33),
            ("moor_k55", self.moor_k55),
            ("aero_ct", self.aero_ct),
            ("cd_surge", self.cd_surge),
            ("cd_heave", self.cd_heave),
            ("cd_pitch", self.cd_pitch),
            ("cd_wec", self.cd_wec),
            ("clearance", self.clearance),
            ("sphere_damping_decay", self.sphere_damping_decay),
            ("sphere_added_mass_rate", self.sphere_added_mass_rate),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Lever arm from the centre of gravity to the nacelle, m.
    pub fn nacelle_lever(&self) -> f64 {
        self.z_wt - self.z_cg
    }

    /// Copy with every quadratic drag coefficient set to zero.
    pub fn without_drag(&self) -> Self {
        Self {
            cd_surge: 0.0,
            cd_heave: 0.0,
            cd_pitch: 0.0,
            cd_wec: 0.0,
            ..self.clone()
        }
    }
}
