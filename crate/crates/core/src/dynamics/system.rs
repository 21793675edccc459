use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::linalg::solve_sym3;
use super::{Geometry, PtoSetting, ResponseStats, HEAVE, NDOF, PITCH, SURGE, WEC0};
use crate::environment::{
    jonswap_spectrum, kaimal_spectrum, platform_hydro, sphere_hydro, wavenumber, FrequencyGrid, HydroCoeffs,
    PhysicsConfig, PlatformCoeffs, SeaState,
};
use crate::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Design-independent data: constants, grid, platform coefficients and the
/// static part of the platform impedance at every grid frequency.
#[derive(Debug, Clone)]
pub struct ModelContext {
    cfg: PhysicsConfig,
    grid: FrequencyGrid,
    weights: Vec<f64>,
    platform: PlatformCoeffs,
    platform_impedance: Vec<[[C; 3]; 3]>,
}

impl ModelContext {
    pub fn new(cfg: PhysicsConfig, grid: FrequencyGrid) -> Result<Self> {
        cfg.validate()?;
        let platform = platform_hydro(&grid, &cfg);
        let platform_impedance = grid
            .omegas()
            .iter()
            .map(|&w| {
                let mut z = [[ZERO; 3]; 3];
                for (r, row) in z.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = C::new(
                            -w * w * (platform.mass[r][c] + platform.added_mass[r][c])
                                + platform.hydrostatic_stiffness[r][c]
                                + platform.mooring_stiffness[r][c],
                            w * platform.radiation_damping[r][c],
                        );
                    }
                }
                z
            })
            .collect();
        Ok(Self {
            weights: grid.trapezoid_weights(),
            cfg,
            grid,
            platform,
            platform_impedance,
        })
    }

    pub fn config(&self) -> &PhysicsConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn platform(&self) -> &PlatformCoeffs {
        &self.platform
    }

    /// Lumped quadratic drag per DOF for spheres of radius `a`.
    pub fn drag_coefficients(&self, a: f64) -> [f64; NDOF] {
        let c = &self.cfg;
        let wec = 0.5 * c.rho_water * c.cd_wec * PI * a * a;
        [c.cd_surge, c.cd_heave, c.cd_pitch, wec, wec, wec]
    }

    /// Linearised rotor thrust sensitivity to wind speed, N s/m. Acts both
    /// as aerodynamic damping and as the wind load per unit gust speed.
    pub fn aero_damping(&self, uw: f64) -> f64 {
        self.cfg.rho_air * self.cfg.rotor_area * self.cfg.aero_ct * uw
    }

    pub fn spectra(&self, state: &SeaState) -> Spectra {
        Spectra {
            state: *state,
            wave: jonswap_spectrum(state, &self.grid, &self.cfg),
            wind: kaimal_spectrum(state, &self.grid, &self.cfg),
        }
    }

    pub fn system(&self, geom: Geometry) -> Result<HybridSystem<'_>> {
        let sphere = sphere_hydro(geom.radius, &self.grid, &self.cfg)?;
        Ok(HybridSystem::with_sphere(self, geom, sphere))
    }

    fn aero_terms(&self, uw: f64) -> (f64, f64) {
        (self.aero_damping(uw), self.cfg.nacelle_lever())
    }

    /// Platform-only response (no spheres, no PTO), given equivalent
    /// damping for surge, heave and pitch.
    pub fn solve_platform(&self, spectra: &Spectra, eq: &[f64; NDOF]) -> Result<ResponseStats> {
        let (b_aero, h) = self.aero_terms(spectra.state.uw);
        let mut acc = Accumulator::default();
        for (i, &w) in self.grid.omegas().iter().enumerate() {
            let (sw, su) = (spectra.wave[i], spectra.wind[i]);
            if sw == 0.0 && su == 0.0 {
                continue;
            }
            let mut p = self.platform_impedance[i];
            add_platform_damping(&mut p, w, eq, b_aero, h);
            let exc = self.platform.excitation[i];
            let mut rhs = [[ZERO; 2]; 3];
            for r in 0..3 {
                rhs[r][0] = exc[r];
            }
            rhs[SURGE][1] = C::new(b_aero, 0.0);
            rhs[PITCH][1] = C::new(h * b_aero, 0.0);
            let q = solve_sym3(&p, &rhs).ok_or_else(|| singular(w))?;
            let mut h6 = [[ZERO; 2]; NDOF];
            h6[..3].copy_from_slice(&q);
            acc.add(w, self.weights[i], sw, su, &h6, &[0.0; 3], h);
        }
        acc.finish()
    }
}

fn add_platform_damping(p: &mut [[C; 3]; 3], w: f64, eq: &[f64; NDOF], b_aero: f64, h: f64) {
    p[SURGE][SURGE].im += w * (eq[SURGE] + b_aero);
    p[HEAVE][HEAVE].im += w * eq[HEAVE];
    p[PITCH][PITCH].im += w * (eq[PITCH] + b_aero * h * h);
    p[SURGE][PITCH].im += w * b_aero * h;
    p[PITCH][SURGE].im += w * b_aero * h;
}

fn singular(w: f64) -> Error {
    Error::Numerical {
        omega: w,
        condition: f64::INFINITY,
        message: "singular system matrix".into(),
    }
}

/// Wave and wind input spectra of one sea state on the model grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectra {
    pub state: SeaState,
    /// Wave elevation spectrum, m^2 s/rad.
    pub wave: Vec<f64>,
    /// Gust speed spectrum, m^2/s.
    pub wind: Vec<f64>,
}

/// The full complex system at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub omega: f64,
    /// `-w^2 (M + A) + i w (B_rad + B_aero + B_visc + B_pto) + K_moor + K_hs + K_pto`.
    pub impedance: [[C; NDOF]; NDOF],
    /// Load per unit wave amplitude.
    pub wave_load: [C; NDOF],
    /// Load per unit gust speed.
    pub wind_load: [C; NDOF],
}

/// Platform plus three spheres of one geometry.
#[derive(Debug, Clone)]
pub struct HybridSystem<'a> {
    ctx: &'a ModelContext,
    geom: Geometry,
    sphere: HydroCoeffs,
    /// `-w^2 (m + A) + i w B + K_hs` of one sphere.
    wec_impedance: Vec<C>,
    /// Sphere excitation including the incident-wave phase at each sphere.
    wec_excitation: Vec<[C; 3]>,
}

impl<'a> HybridSystem<'a> {
    pub fn with_sphere(ctx: &'a ModelContext, geom: Geometry, sphere: HydroCoeffs) -> Self {
        let g = ctx.cfg.g;
        let wec_impedance = ctx
            .grid
            .omegas()
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                C::new(
                    -w * w * (sphere.mass + sphere.added_mass[i]) + sphere.hydrostatic_stiffness,
                    w * sphere.radiation_damping[i],
                )
            })
            .collect();
        let wec_excitation = ctx
            .grid
            .omegas()
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let k = wavenumber(w, g);
                let x0 = sphere.excitation[i];
                let e0 = x0 * C::from_polar(1.0, -k * geom.wec_x[0]);
                let e1 = x0 * C::from_polar(1.0, -k * geom.wec_x[1]);
                [e0, e1, e1]
            })
            .collect();
        Self {
            ctx,
            geom,
            sphere,
            wec_impedance,
            wec_excitation,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn sphere(&self) -> &HydroCoeffs {
        &self.sphere
    }

    pub fn context(&self) -> &'a ModelContext {
        self.ctx
    }

    pub fn drag_coefficients(&self) -> [f64; NDOF] {
        self.ctx.drag_coefficients(self.geom.radius)
    }

    /// PTO coupling vector of sphere `j` on the platform DOFs: relative
    /// displacement is `q_w + u . q_platform`.
    fn coupling(&self, j: usize) -> [f64; 3] {
        [0.0, -1.0, self.geom.wec_x[j]]
    }

    /// Builds the full 6x6 system at grid index `i`.
    pub fn assemble(&self, pto: &PtoSetting, eq: &[f64; NDOF], uw: f64, i: usize) -> SystemMatrices {
        let w = self.ctx.grid.omegas()[i];
        let (b_aero, h) = self.ctx.aero_terms(uw);
        let mut z = [[ZERO; NDOF]; NDOF];
        let mut p = self.ctx.platform_impedance[i];
        add_platform_damping(&mut p, w, eq, b_aero, h);
        for r in 0..3 {
            z[r][..3].copy_from_slice(&p[r]);
        }
        let zp = C::new(pto.k_pto, w * pto.b_pto);
        for j in 0..3 {
            let d = WEC0 + j;
            z[d][d] = self.wec_impedance[i] + C::new(0.0, w * eq[d]);
            // zp * c c^T with c = e_d + u on the platform block.
            let u = self.coupling(j);
            let mut c = [0.0; NDOF];
            c[..3].copy_from_slice(&u);
            c[d] = 1.0;
            for r in 0..NDOF {
                if c[r] == 0.0 {
                    continue;
                }
                for s in 0..NDOF {
                    if c[s] != 0.0 {
                        z[r][s] += zp * (c[r] * c[s]);
                    }
                }
            }
        }
        let exc = self.ctx.platform.excitation[i];
        let mut wave_load = [ZERO; NDOF];
        wave_load[..3].copy_from_slice(&exc);
        wave_load[WEC0..].copy_from_slice(&self.wec_excitation[i]);
        let mut wind_load = [ZERO; NDOF];
        wind_load[SURGE] = C::new(b_aero, 0.0);
        wind_load[PITCH] = C::new(h * b_aero, 0.0);
        SystemMatrices {
            omega: w,
            impedance: z,
            wave_load,
            wind_load,
        }
    }

    /// Spectral response with the three sphere DOFs condensed onto the
    /// platform block.
    pub fn solve_response(&self, pto: &PtoSetting, spectra: &Spectra, eq: &[f64; NDOF]) -> Result<ResponseStats> {
        let ctx = self.ctx;
        let (b_aero, h) = ctx.aero_terms(spectra.state.uw);
        let x = self.geom.wec_x;
        // Spheres 2 and 3 see identical loads when they share x and damping.
        let mirror = x[1] == x[2] && eq[WEC0 + 1] == eq[WEC0 + 2];
        let mut acc = Accumulator::default();
        for (i, &w) in ctx.grid.omegas().iter().enumerate() {
            let (sw, su) = (spectra.wave[i], spectra.wind[i]);
            if sw == 0.0 && su == 0.0 {
                continue;
            }
            let mut p = ctx.platform_impedance[i];
            add_platform_damping(&mut p, w, eq, b_aero, h);
            let exc = ctx.platform.excitation[i];
            let mut rhs = [
                [exc[0], C::new(b_aero, 0.0)],
                [exc[1], ZERO],
                [exc[2], C::new(h * b_aero, 0.0)],
            ];
            let zp = C::new(pto.k_pto, w * pto.b_pto);
            let mut inv_d = [ZERO; 3];
            let mut terms = (ZERO, ZERO);
            for j in 0..3 {
                if !(mirror && j == 2) {
                    let zw = self.wec_impedance[i] + C::new(0.0, w * eq[WEC0 + j]);
                    let id = (zw + zp).inv();
                    inv_d[j] = id;
                    terms = (zp * zw * id, zp * id * self.wec_excitation[i][j]);
                } else {
                    inv_d[2] = inv_d[1];
                }
                let (series, f) = terms;
                let xj = x[j];
                // u = (0, -1, x_j)
                p[HEAVE][HEAVE] += series;
                p[HEAVE][PITCH] -= series * xj;
                p[PITCH][HEAVE] -= series * xj;
                p[PITCH][PITCH] += series * (xj * xj);
                rhs[HEAVE][0] += f;
                rhs[PITCH][0] -= f * xj;
            }
            let q = solve_sym3(&p, &rhs).ok_or_else(|| singular(w))?;
            let mut h6 = [[ZERO; 2]; NDOF];
            h6[..3].copy_from_slice(&q);
            for j in 0..3 {
                if mirror && j == 2 {
                    h6[WEC0 + 2] = h6[WEC0 + 1];
                    continue;
                }
                let uq0 = -q[HEAVE][0] + q[PITCH][0] * x[j];
                let uq1 = -q[HEAVE][1] + q[PITCH][1] * x[j];
                h6[WEC0 + j][0] = (self.wec_excitation[i][j] - zp * uq0) * inv_d[j];
                h6[WEC0 + j][1] = -zp * uq1 * inv_d[j];
            }
            acc.add(w, ctx.weights[i], sw, su, &h6, &x, h);
        }
        acc.finish()
    }

    /// Same as [`Self::solve_response`] through a dense LU of the assembled
    /// 6x6 system.
    pub fn solve_response_direct(&self, pto: &PtoSetting, spectra: &Spectra, eq: &[f64; NDOF]) -> Result<ResponseStats> {
        let ctx = self.ctx;
        let h = ctx.cfg.nacelle_lever();
        let mut acc = Accumulator::default();
        for (i, &w) in ctx.grid.omegas().iter().enumerate() {
            let (sw, su) = (spectra.wave[i], spectra.wind[i]);
            if sw == 0.0 && su == 0.0 {
                continue;
            }
            let sys = self.assemble(pto, eq, spectra.state.uw, i);
            let q = sys.solve()?;
            acc.add(w, ctx.weights[i], sw, su, &q, &self.geom.wec_x, h);
        }
        acc.finish()
    }
}

impl SystemMatrices {
    pub fn matrix(&self) -> SMatrix<C, NDOF, NDOF> {
        SMatrix::from_fn(|r, c| self.impedance[r][c])
    }

    /// Complex amplitudes per DOF for unit wave amplitude (column 0) and unit
    /// gust speed (column 1).
    pub fn solve(&self) -> Result<[[C; 2]; NDOF]> {
        let m = self.matrix();
        let lu = m.lu();
        let rhs = SMatrix::<C, NDOF, 2>::from_fn(|r, c| if c == 0 { self.wave_load[r] } else { self.wind_load[r] });
        let sol = lu.solve(&rhs).filter(|s| s.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
        match sol {
            Some(s) => {
                let mut out = [[ZERO; 2]; NDOF];
                for r in 0..NDOF {
                    out[r] = [s[(r, 0)], s[(r, 1)]];
                }
                Ok(out)
            }
            None => Err(Error::Numerical {
                omega: self.omega,
                condition: self.condition_estimate(),
                message: "singular system matrix".into(),
            }),
        }
    }

    /// Ratio of extreme singular values.
    pub fn condition_estimate(&self) -> f64 {
        let sv: SVector<f64, NDOF> = self.matrix().singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Accumulates response variances by trapezoid quadrature.
#[derive(Default)]
struct Accumulator {
    var_q: [f64; NDOF],
    var_v: [f64; NDOF],
    var_rel: [f64; 3],
    var_nacelle: f64,
}

impl Accumulator {
    /// `h[dof] = [per unit wave amplitude, per unit gust speed]`.
    #[allow(clippy::too_many_arguments)]
    fn add(&mut self, w: f64, weight: f64, s_wave: f64, s_wind: f64, h: &[[C; 2]; NDOF], wec_x: &[f64; 3], lever: f64) {
        let aw = weight * s_wave;
        let au = weight * s_wind;
        let w2 = w * w;
        for d in 0..NDOF {
            let v = aw * h[d][0].norm_sqr() + au * h[d][1].norm_sqr();
            self.var_q[d] += v;
            self.var_v[d] += w2 * v;
        }
        for j in 0..3 {
            let r0 = h[WEC0 + j][0] - h[HEAVE][0] + h[PITCH][0] * wec_x[j];
            let r1 = h[WEC0 + j][1] - h[HEAVE][1] + h[PITCH][1] * wec_x[j];
            self.var_rel[j] += w2 * (aw * r0.norm_sqr() + au * r1.norm_sqr());
        }
        let n0 = h[SURGE][0] + h[PITCH][0] * lever;
        let n1 = h[SURGE][1] + h[PITCH][1] * lever;
        self.var_nacelle += w2 * w2 * (aw * n0.norm_sqr() + au * n1.norm_sqr());
    }

    fn finish(self) -> Result<ResponseStats> {
        let stats = ResponseStats {
            sigma_q: self.var_q.map(f64::sqrt),
            sigma_vel: self.var_v.map(f64::sqrt),
            sigma_relvel: self.var_rel.map(f64::sqrt),
            sigma_nacelle: self.var_nacelle.sqrt(),
        };
        if stats.is_finite() {
            Ok(stats)
        } else {
            Err(Error::Numerical {
                omega: f64::NAN,
                condition: f64::NAN,
                message: "non-finite response integrand".into(),
            })
        }
    }
}

/// Velocity transfer function of a single sphere heaving against a fixed
/// reference, per unit wave amplitude.
pub(crate) fn single_wec_response(
    sys: &HybridSystem<'_>,
    pto: &PtoSetting,
    spectra: &Spectra,
    eq: f64,
) -> Result<f64> {
    let ctx = sys.ctx;
    let mut var_v = 0.0;
    for (i, &w) in ctx.grid.omegas().iter().enumerate() {
        let sw = spectra.wave[i];
        if sw == 0.0 {
            continue;
        }
        let z = sys.wec_impedance[i] + C::new(pto.k_pto, w * (pto.b_pto + eq));
        if z.norm_sqr() == 0.0 {
            return Err(singular(w));
        }
        let xi = sys.sphere.excitation[i] / z;
        var_v += ctx.weights[i] * sw * w * w * xi.norm_sqr();
    }
    if var_v.is_finite() {
        Ok(var_v)
    } else {
        Err(Error::Numerical {
            omega: f64::NAN,
            condition: f64::NAN,
            message: "non-finite response integrand".into(),
        })
    }
}
