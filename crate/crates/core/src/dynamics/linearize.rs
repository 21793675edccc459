use serde::{Deserialize, Serialize};

use super::system::single_wec_response;
use super::{HybridSystem, ModelContext, PtoSetting, ResponseStats, Spectra, NDOF, WEC0};
use crate::{Error, Result};

/// Gaussian equivalent-damping factor for quadratic drag.
const GAUSSIAN_DRAG_FACTOR: f64 = 1.595_769_121_605_730_7; // sqrt(8 / pi)

/// Controls of the statistical linearisation loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearizeOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new equivalent damping in a plain update.
    pub relaxation: f64,
    /// Per-DOF secant acceleration: the first update takes the full drag
    /// estimate, later ones extrapolate from the last two iterates. Falls
    /// back to the relaxed update when the secant step is degenerate or
    /// negative.
    pub secant: bool,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 50,
            relaxation: 0.5,
            secant: true,
        }
    }
}

impl LinearizeOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::Config(format!("invalid linearisation options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearized {
    pub stats: ResponseStats,
    pub iterations: usize,
    pub converged: bool,
    /// Final equivalent viscous damping per DOF, N s/m (N m s for pitch).
    pub eq_damping: [f64; NDOF],
}

/// Power of one sphere heaving against a fixed reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolatedWec {
    /// Absorbed power, W.
    pub power: f64,
    pub sigma_vel: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn iterate<F>(cd: &[f64; NDOF], opts: &LinearizeOptions, mut solve: F) -> Result<Linearized>
where
    F: FnMut(&[f64; NDOF]) -> Result<ResponseStats>,
{
    opts.validate()?;
    let mut eq = [0.0; NDOF];
    let mut stats = solve(&eq)?;
    if cd.iter().all(|&c| c == 0.0) {
        return Ok(Linearized {
            stats,
            iterations: 1,
            converged: true,
            eq_damping: eq,
        });
    }
    let mut iterations = 1;
    let mut converged = false;
    let mut previous: Option<([f64; NDOF], [f64; NDOF])> = None;
    while iterations < opts.max_iter {
        let mut residual = [0.0; NDOF];
        for d in 0..NDOF {
            residual[d] = GAUSSIAN_DRAG_FACTOR * stats.sigma_vel[d] * cd[d] - eq[d];
        }
        let current = eq;
        for d in 0..NDOF {
            let relaxed = eq[d] + opts.relaxation * residual[d];
            eq[d] = match previous {
                Some((eq_prev, r_prev)) if opts.secant => {
                    let dr = residual[d] - r_prev[d];
                    let step = -residual[d] * (eq[d] - eq_prev[d]) / dr;
                    let next = eq[d] + step;
                    if dr != 0.0 && next.is_finite() && next >= 0.0 {
                        next
                    } else {
                        relaxed
                    }
                }
                None if opts.secant => eq[d] + residual[d],
                _ => relaxed,
            };
        }
        previous = Some((current, residual));
        let next = solve(&eq)?;
        iterations += 1;
        let change = next.max_relative_change(&stats);
        stats = next;
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(Linearized {
        stats,
        iterations,
        converged,
        eq_damping: eq,
    })
}

/// Hybrid response with quadratic drag replaced by equivalent linear damping.
pub fn linearize(
    sys: &HybridSystem<'_>,
    pto: &PtoSetting,
    spectra: &Spectra,
    opts: &LinearizeOptions,
) -> Result<Linearized> {
    let cd = sys.drag_coefficients();
    iterate(&cd, opts, |eq| sys.solve_response(pto, spectra, eq))
}

/// Platform-only response without spheres.
pub fn isolated_fowt(ctx: &ModelContext, spectra: &Spectra, opts: &LinearizeOptions) -> Result<Linearized> {
    let mut cd = ctx.drag_coefficients(1.0);
    cd[WEC0..].fill(0.0);
    iterate(&cd, opts, |eq| ctx.solve_platform(spectra, eq))
}

pub fn isolated_wec(
    sys: &HybridSystem<'_>,
    pto: &PtoSetting,
    spectra: &Spectra,
    opts: &LinearizeOptions,
) -> Result<IsolatedWec> {
    let mut cd = [0.0; NDOF];
    cd[WEC0] = sys.drag_coefficients()[WEC0];
    let lin = iterate(&cd, opts, |eq| {
        let var = single_wec_response(sys, pto, spectra, eq[WEC0])?;
        let mut stats = ResponseStats::default();
        stats.sigma_vel[WEC0] = var.sqrt();
        stats.sigma_relvel[0] = var.sqrt();
        Ok(stats)
    })?;
    let sigma_vel = lin.stats.sigma_vel[WEC0];
    Ok(IsolatedWec {
        power: pto.b_pto * sigma_vel * sigma_vel,
        sigma_vel,
        iterations: lin.iterations,
        converged: lin.converged,
    })
}
