//! Test-only oracles shared by the integration suites.
#![allow(dead_code)]

use hywave::dynamics::{HybridSystem, PtoSetting, Spectra, HEAVE, NDOF, PITCH, SURGE, WEC0};
use hywave::environment::FrequencyGrid;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Harmonics `k * 2 pi / duration` that fall inside `[lo, hi]`.
pub fn harmonic_grid(duration: f64, lo: f64, hi: f64) -> FrequencyGrid {
    let dw = 2.0 * PI / duration;
    let k0 = (lo / dw).ceil() as usize;
    let k1 = (hi / dw).floor() as usize;
    FrequencyGrid::new((k0..=k1).map(|k| k as f64 * dw).collect()).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct OracleStats {
    pub sigma_relvel: [f64; 3],
    pub sigma_nacelle: f64,
    pub power: f64,
}

/// Monte Carlo estimate of the hybrid response with quadratic drag kept in
/// the time domain.
///
/// Each realization draws random phases for every harmonic of the wave and
/// gust spectra, then iterates
/// `Z(w) X = F_wave + F_wind + FFT(-cd |v| v + b_lin v)` with `b_lin v`
/// also on the left until the harmonic amplitudes settle. `sys` must be built
/// on [`harmonic_grid`] with the same `duration`.
pub fn time_domain_oracle(
    sys: &HybridSystem<'_>,
    pto: &PtoSetting,
    spectra: &Spectra,
    b_lin: &[f64; NDOF],
    realizations: usize,
    duration: f64,
    seed: u64,
) -> OracleStats {
    let omegas = sys.context().grid().omegas().to_vec();
    let dw = 2.0 * PI / duration;
    let ks: Vec<usize> = omegas.iter().map(|w| (w / dw).round() as usize).collect();
    let n = (4 * ks.last().unwrap() + 4).next_power_of_two();
    let cd = sys.drag_coefficients();
    let x = sys.geometry().wec_x;
    let lever = sys.geometry().nacelle_lever();
    let uw = spectra.state.uw;
    let mats: Vec<_> = (0..omegas.len()).map(|i| sys.assemble(pto, b_lin, uw, i)).collect();
    let lus: Vec<_> = mats.iter().map(|m| m.matrix().lu()).collect();
    let mut planner = FftPlanner::<f64>::new();
    let inverse = planner.plan_fft_inverse(n);
    let forward = planner.plan_fft_forward(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let to_time = |amps: &[C]| -> Vec<f64> {
        let mut buf = vec![C::new(0.0, 0.0); n];
        for (a, &k) in amps.iter().zip(&ks) {
            buf[k] = *a;
        }
        inverse.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    };

    let (mut var_rel, mut var_nac) = ([0.0; 3], 0.0);
    for _ in 0..realizations {
        let base: Vec<[C; NDOF]> = (0..omegas.len())
            .map(|i| {
                let aw = (2.0 * spectra.wave[i] * dw).sqrt() * C::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
                let au = (2.0 * spectra.wind[i] * dw).sqrt() * C::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
                let mut f = [C::new(0.0, 0.0); NDOF];
                for d in 0..NDOF {
                    f[d] = mats[i].wave_load[d] * aw + mats[i].wind_load[d] * au;
                }
                f
            })
            .collect();
        let mut drag = vec![[C::new(0.0, 0.0); NDOF]; omegas.len()];
        let mut amps = vec![[C::new(0.0, 0.0); NDOF]; omegas.len()];
        for _ in 0..200 {
            let mut change: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..omegas.len() {
                let rhs = nalgebra::SVector::<C, NDOF>::from_fn(|d, _| base[i][d] + drag[i][d]);
                let sol = lus[i].solve(&rhs).unwrap();
                for d in 0..NDOF {
                    change = change.max((sol[d] - amps[i][d]).norm());
                    scale = scale.max(sol[d].norm());
                    amps[i][d] = sol[d];
                }
            }
            for d in 0..NDOF {
                if cd[d] == 0.0 {
                    continue;
                }
                let vel: Vec<C> = amps.iter().zip(&omegas).map(|(a, &w)| C::new(0.0, w) * a[d]).collect();
                let v = to_time(&vel);
                let mut buf: Vec<C> = v.iter().map(|&v| C::new(-cd[d] * v.abs() * v + b_lin[d] * v, 0.0)).collect();
                forward.process(&mut buf);
                for (i, &k) in ks.iter().enumerate() {
                    drag[i][d] = buf[k] * (2.0 / n as f64);
                }
            }
            if change <= 1e-10 * scale {
                break;
            }
        }
        for j in 0..3 {
            let rel: Vec<C> = amps
                .iter()
                .zip(&omegas)
                .map(|(a, &w)| C::new(0.0, w) * (a[WEC0 + j] - a[HEAVE] + a[PITCH] * x[j]))
                .collect();
            var_rel[j] += mean_square(&to_time(&rel));
        }
        let nac: Vec<C> = amps
            .iter()
            .zip(&omegas)
            .map(|(a, &w)| -(w * w) * (a[SURGE] + a[PITCH] * lever))
            .collect();
        var_nac += mean_square(&to_time(&nac));
    }
    let r = realizations as f64;
    let sigma_relvel = var_rel.map(|v| (v / r).sqrt());
    OracleStats {
        sigma_relvel,
        sigma_nacelle: (var_nac / r).sqrt(),
        power: pto.b_pto * sigma_relvel.iter().map(|s| s * s).sum::<f64>(),
    }
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}
