use std::f64::consts::PI;

use super::{FrequencyGrid, PhysicsConfig, SeaState};

/// JONSWAP wave elevation spectrum, m^2 s/rad, sampled on `grid`.
///
/// The shape is the usual Pierson-Moskowitz core with peak enhancement
/// `gamma`; the normalisation is computed by quadrature so that the
/// spectrum integrates to `hs^2 / 16` over `(0, inf)` for any `gamma`.
pub fn jonswap_spectrum(state: &SeaState, grid: &FrequencyGrid, cfg: &PhysicsConfig) -> Vec<f64> {
    if state.hs == 0.0 {
        return vec![0.0; grid.len()];
    }
    let gamma = cfg.jonswap_gamma;
    let wp = 2.0 * PI / state.tp;
    let scale = state.hs * state.hs / 16.0 / wp / jonswap_shape_integral(gamma);
    grid.omegas()
        .iter()
        .map(|&w| scale * jonswap_shape(w / wp, gamma))
        .collect()
}

/// Non-dimensional JONSWAP shape in `x = omega / omega_p`, peaking at `x = 1`.
fn jonswap_shape(x: f64, gamma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let x4 = x * x * x * x;
    let width = if x <= 1.0 { 0.07 } else { 0.09 };
    let r = (-(x - 1.0) * (x - 1.0) / (2.0 * width * width)).exp();
    (-1.25 / x4).exp() / (x4 * x) * gamma.powf(r)
}

/// Integral of [`jonswap_shape`] over `(0, inf)`.
fn jonswap_shape_integral(gamma: f64) -> f64 {
    // Composite Simpson on [lo, hi] plus the x^-5 tail. Below lo the
    // integrand is under 1e-20.
    let (lo, hi, n) = (0.3_f64, 40.0_f64, 20_000usize);
    let h = (hi - lo) / n as f64;
    let mut sum = jonswap_shape(lo, gamma) + jonswap_shape(hi, gamma);
    for i in 1..n {
        let coef = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += coef * jonswap_shape(lo + h * i as f64, gamma);
    }
    sum * h / 3.0 + 0.25 / hi.powi(4)
}

/// Kaimal longitudinal wind-speed spectrum, m^2/s per rad/s, on `grid`.
///
/// Variance over `(0, inf)` is `(I * uw)^2` with `I` the configured
/// turbulence intensity.
pub fn kaimal_spectrum(state: &SeaState, grid: &FrequencyGrid, cfg: &PhysicsConfig) -> Vec<f64> {
    if state.uw == 0.0 {
        return vec![0.0; grid.len()];
    }
    let sigma = cfg.turbulence_intensity * state.uw;
    let time_scale = cfg.kaimal_length_scale / state.uw;
    grid.omegas()
        .iter()
        .map(|&w| {
            let f = w / (2.0 * PI);
            let s_hz = 4.0 * sigma * sigma * time_scale / (1.0 + 6.0 * f * time_scale).powf(5.0 / 3.0);
            s_hz / (2.0 * PI)
        })
        .collect()
}
