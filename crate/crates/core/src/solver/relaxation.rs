//! Stiff source substep: one ODE solve per cell with `nu_T` frozen.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::math::{ceil, exp, sqrt};
use crate::model::{eddy_viscosity, ModelParams, RescaledState};

const MIN_K_STEPS: usize = 10;
const MAX_K_STEPS: usize = 10_000;

/// Advance one cell by `dt` under the source alone.
///
/// Returns the new state and whether `k` had to be clamped at zero.
pub fn relax_cell(s: &RescaledState, params: &ModelParams, dt: f64) -> Result<(RescaledState, bool)> {
    if s.k < 0.0 {
        return Err(Error::State("negative turbulent kinetic energy"));
    }
    let (nu_t, _) = eddy_viscosity(s.k, params)?;
    let e = params.epsilon;
    let visc = nu_t + params.nu;
    let tau_sigma = e * params.alpha1 * visc;
    let tau_y = e * params.alpha3 * visc;
    let decay = params.beta * params.c_d / (params.alpha2 * params.l);

    let mut out = *s;
    out.sigma = s.sigma.scale(exp(-dt / tau_sigma));
    out.y = s.y.map(|x| x * exp(-dt / tau_y));

    let ss0 = s.sigma.norm_sq();
    let mut k = if ss0 == 0.0 {
        let r = 1.0 + 0.5 * decay * sqrt(s.k) * dt;
        s.k / (r * r)
    } else {
        // sigma:sigma decays like exp(-2t / tau_sigma)
        let production = 2.0 * params.beta / (e * params.alpha2) * nu_t / (visc * visc) * ss0;
        let rate = |t: f64, k: f64| {
            let k = k.max(0.0);
            production * exp(-2.0 * t / tau_sigma) - decay * k * sqrt(k)
        };
        let stiff = (dt / tau_sigma).max(decay * sqrt(s.k) * dt);
        let n = (ceil(10.0 * stiff) as usize).clamp(MIN_K_STEPS, MAX_K_STEPS);
        let h = dt / n as f64;
        let mut k = s.k;
        for i in 0..n {
            let t = i as f64 * h;
            let f0 = rate(t, k);
            let f1 = rate(t + h, k + h * f0);
            k += 0.5 * h * (f0 + f1);
        }
        k
    };
    let clamped = k < 0.0;
    if clamped {
        k = 0.0;
    }
    out.k = k;
    if !out.is_finite() {
        return Err(Error::Numerical("relaxation produced a non-finite state"));
    }
    Ok((out, clamped))
}

/// Per-cell relaxation over `dt`; returns the new field and the clamp count.
pub fn relaxation_substep(field: &Field, params: &ModelParams, dt: f64) -> Result<(Field, usize)> {
    let mut clamps = 0;
    let cells = field
        .cells
        .iter()
        .map(|c| {
            let (c, clamped) = relax_cell(c, params, dt)?;
            clamps += clamped as usize;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Field { grid: field.grid, cells }, clamps))
}
