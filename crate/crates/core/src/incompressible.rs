//! Spectral reference solver for the incompressible limit: RANS momentum with
//! the relaxed stress replaced by its quasi-equilibrium, coupled with the
//! one-equation model for `k`, and the well-prepared compressible data built
//! from it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::math::sqrt;
use crate::model::{ModelParams, RescaledState, Sym6};
use crate::spectral::Spectral;

/// Velocity (3 components, in-plane derivatives only), zero-mean pressure and
/// turbulent kinetic energy, each stored row-major on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompressibleState {
    pub u: [Vec<f64>; 3],
    pub pi: Vec<f64>,
    pub k: Vec<f64>,
}

impl IncompressibleState {
    /// Projects `u` and fills `pi` from the momentum balance.
    pub fn new(u: [Vec<f64>; 3], k: Vec<f64>, spectral: &Spectral, params: &ModelParams) -> Result<Self> {
        let n = spectral.grid().n_cells();
        if u.iter().any(|c| c.len() != n) || k.len() != n {
            return Err(Error::Usage("field length does not match grid"));
        }
        let u = project_divfree(&u, spectral);
        let mut s = Self { u, pi: vec![0.0; n], k };
        s.pi = limit_rhs(&s, spectral, params)?.pi;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.iter().any(|&k| !(k >= 0.0)) {
            return Err(Error::State("negative turbulent kinetic energy"));
        }
        if self.u.iter().chain([&self.pi, &self.k]).any(|c| c.iter().any(|x| !x.is_finite())) {
            return Err(Error::State("non-finite state"));
        }
        Ok(())
    }
}

/// Leray projection of the in-plane velocity; `u3` has no in-plane
/// divergence and is returned unchanged.
pub fn project_divfree(u: &[Vec<f64>; 3], spectral: &Spectral) -> [Vec<f64>; 3] {
    let (ux, uy) = spectral.project(&u[0], &u[1]);
    [ux, uy, u[2].clone()]
}

/// Max-norm of the discrete divergence.
pub fn max_divergence(u: &[Vec<f64>; 3], spectral: &Spectral) -> f64 {
    spectral.divergence(&u[0], &u[1]).iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Time derivatives of the limit system and the pressure that enforces the
/// constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRhs {
    pub du: [Vec<f64>; 3],
    pub dk: Vec<f64>,
    pub pi: Vec<f64>,
}

/// Velocity gradient `grad[i][j] = d u_i / d x_j` per cell (`j = 2` is zero).
fn velocity_gradient(u: &[Vec<f64>; 3], spectral: &Spectral) -> [[Vec<f64>; 3]; 3] {
    let n = u[0].len();
    u.each_ref().map(|c| {
        let [dx, dy] = spectral.gradient(c);
        [dx, dy, vec![0.0; n]]
    })
}

fn eddy_viscosities(k: &[f64], params: &ModelParams) -> Result<Vec<f64>> {
    k.iter()
        .map(|&k| {
            if !(k >= 0.0) {
                return Err(Error::Domain("negative turbulent kinetic energy"));
            }
            Ok(params.l * sqrt(k))
        })
        .collect()
}

/// Quasi-equilibrium stress `-(nu_T + nu)/2 (grad u + grad u^T)` and flux
/// `-xi alpha3 (nu_T + nu) grad k` per cell (with `rho0 = 1`).
fn closure(
    grad: &[[Vec<f64>; 3]; 3],
    grad_k: &[Vec<f64>; 2],
    nu_t: &[f64],
    params: &ModelParams,
) -> (Vec<Sym6>, Vec<[f64; 3]>) {
    let n = nu_t.len();
    let mut sigma = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for c in 0..n {
        let g: [[f64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| grad[i][j][c]));
        let visc = nu_t[c] + params.nu;
        sigma.push(Sym6::twice_strain(&g).scale(-0.5 * visc));
        let f = -params.xi * params.alpha3 * visc;
        y.push([f * grad_k[0][c], f * grad_k[1][c], 0.0]);
    }
    (sigma, y)
}

fn check_compatible(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if !params.is_limit_compatible() {
        return Err(Error::Config("incompressible limit requires alpha2 = beta = xi^2 and rho0 = 1"));
    }
    Ok(())
}

/// Right-hand side assembled from the stress/flux form:
/// `du = P(-u.grad u - div sigma - (2/3) grad k)`,
/// `dk = -u.grad k - xi/(alpha2 alpha3) div y + (2 beta/alpha2) nu_T/(nu_T+nu)^2 sigma:sigma - beta C_D k^{3/2}/(alpha2 l)`.
pub fn limit_rhs(state: &IncompressibleState, spectral: &Spectral, params: &ModelParams) -> Result<LimitRhs> {
    check_compatible(params)?;
    let n = state.k.len();
    let nu_t = eddy_viscosities(&state.k, params)?;
    let grad = velocity_gradient(&state.u, spectral);
    let grad_k = spectral.gradient(&state.k);
    let (sigma, y) = closure(&grad, &grad_k, &nu_t, params);

    // div sigma, row by row
    let mut div_sigma = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, row) in div_sigma.iter_mut().enumerate() {
        for axis in 0..spectral.grid().dim {
            let t: Vec<f64> = sigma.iter().map(|s| s.to_tensor()[i][axis]).collect();
            for (r, d) in row.iter_mut().zip(spectral.derivative(&t, axis)) {
                *r += d;
            }
        }
    }
    let y1: Vec<f64> = y.iter().map(|v| v[0]).collect();
    let y2: Vec<f64> = y.iter().map(|v| v[1]).collect();
    let div_y = spectral.divergence(&y1, &y2);

    let mut force = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut dk = vec![0.0; n];
    let decay = params.beta * params.c_d / (params.alpha2 * params.l);
    for c in 0..n {
        let u = [state.u[0][c], state.u[1][c], state.u[2][c]];
        for i in 0..3 {
            let adv: f64 = (0..3).map(|j| u[j] * grad[i][j][c]).sum();
            let gk = if i < 2 { grad_k[i][c] } else { 0.0 };
            force[i][c] = -adv - div_sigma[i][c] - 2.0 / 3.0 * gk;
        }
        let visc = nu_t[c] + params.nu;
        let production =
            2.0 * params.beta / params.alpha2 * nu_t[c] / (visc * visc) * sigma[c].norm_sq();
        let k = state.k[c];
        dk[c] = -(u[0] * grad_k[0][c] + u[1] * grad_k[1][c])
            - params.xi / (params.alpha2 * params.alpha3) * div_y[c]
            + production
            - decay * k * sqrt(k);
    }
    let pi = spectral.pressure_from(&force[0], &force[1]);
    let (px, py) = spectral.project(&force[0], &force[1]);
    let [_, _, f3] = force;
    Ok(LimitRhs { du: [px, py, f3], dk, pi })
}

/// `dk` in Prandtl's form
/// `-u.grad k + 2 nu_T S:S - C_D k^{3/2}/l + div((nu + nu_T) grad k)`.
pub fn prandtl_k_rhs(state: &IncompressibleState, spectral: &Spectral, params: &ModelParams) -> Result<Vec<f64>> {
    check_compatible(params)?;
    let n = state.k.len();
    let nu_t = eddy_viscosities(&state.k, params)?;
    let grad = velocity_gradient(&state.u, spectral);
    let grad_k = spectral.gradient(&state.k);
    let fx: Vec<f64> = (0..n).map(|c| (params.nu + nu_t[c]) * grad_k[0][c]).collect();
    let fy: Vec<f64> = (0..n).map(|c| (params.nu + nu_t[c]) * grad_k[1][c]).collect();
    let diffusion = spectral.divergence(&fx, &fy);
    Ok((0..n)
        .map(|c| {
            let g: [[f64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| grad[i][j][c]));
            let strain = Sym6::twice_strain(&g).scale(0.5);
            let k = state.k[c];
            -(state.u[0][c] * grad_k[0][c] + state.u[1][c] * grad_k[1][c])
                + 2.0 * nu_t[c] * strain.norm_sq()
                - params.c_d * k * sqrt(k) / params.l
                + diffusion[c]
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitControls {
    /// Fraction of the advective and diffusive stability limits.
    pub cfl: f64,
    /// Upper bound on the step.
    pub dt_max: f64,
    pub t_final: f64,
    pub max_steps: usize,
}

impl Default for LimitControls {
    fn default() -> Self {
        Self { cfl: 0.5, dt_max: 1e-2, t_final: 1.0, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTrajectory {
    pub state: IncompressibleState,
    pub time: f64,
    pub steps: usize,
    /// Largest divergence max-norm seen at any step (including the start).
    pub max_divergence: f64,
    /// k-clamp events.
    pub clamps: usize,
}

fn stable_dt(state: &IncompressibleState, grid: &Grid, params: &ModelParams, cfl: f64) -> f64 {
    let h = if grid.dim == 1 { grid.dx() } else { grid.dx().min(grid.dy()) };
    let dims = grid.dim as f64;
    let mut speed = 0.0_f64;
    let mut visc = params.nu;
    for c in 0..state.k.len() {
        speed = speed.max(state.u[0][c].abs() + state.u[1][c].abs());
        let nu_t = params.l * sqrt(state.k[c].max(0.0));
        visc = visc.max(nu_t + params.nu);
    }
    let pi = core::f64::consts::PI;
    let adv = if speed > 0.0 { h / (pi * speed) } else { f64::INFINITY };
    let diff = h * h / (pi * pi * dims * visc);
    cfl * adv.min(diff)
}

fn combine(a: &IncompressibleState, wa: f64, b: &IncompressibleState, wb: f64, rhs: &LimitRhs, h: f64) -> IncompressibleState {
    let mix = |x: &[f64], y: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len()).map(|c| wa * x[c] + wb * (y[c] + h * d[c])).collect()
    };
    IncompressibleState {
        u: core::array::from_fn(|i| mix(&a.u[i], &b.u[i], &rhs.du[i])),
        pi: rhs.pi.clone(),
        k: mix(&a.k, &b.k, &rhs.dk),
    }
}

fn clamp(state: &mut IncompressibleState) -> usize {
    let mut n = 0;
    for k in state.k.iter_mut() {
        if *k < 0.0 {
            *k = 0.0;
            n += 1;
        }
    }
    n
}

/// Integrate with SSP-RK3; every stage uses the projected right-hand side and
/// the result is projected again, so the divergence stays at round-off.
pub fn run_limit(
    initial: &IncompressibleState,
    spectral: &Spectral,
    params: &ModelParams,
    controls: &LimitControls,
) -> Result<LimitTrajectory> {
    check_compatible(params)?;
    initial.validate()?;
    if !(controls.cfl > 0.0 && controls.cfl <= 1.0) {
        return Err(Error::Config("cfl must be in (0, 1]"));
    }
    if !(controls.dt_max > 0.0) || !(controls.t_final >= 0.0) {
        return Err(Error::Config("time controls must be positive"));
    }
    let grid = *spectral.grid();
    let mut state = initial.clone();
    let mut time = 0.0;
    let mut steps = 0;
    let mut clamps = 0;
    let mut max_div = max_divergence(&state.u, spectral);

    while time < controls.t_final && steps < controls.max_steps {
        let next_step = steps + 1;
        let abort = |e: Error| Error::aborted(next_step, e);
        let mut dt = stable_dt(&state, &grid, params, controls.cfl).min(controls.dt_max);
        if time + dt >= controls.t_final * (1.0 - 1e-14) {
            dt = controls.t_final - time;
        }
        let r0 = limit_rhs(&state, spectral, params).map_err(abort)?;
        let mut s1 = combine(&state, 0.0, &state, 1.0, &r0, dt);
        clamps += clamp(&mut s1);
        let r1 = limit_rhs(&s1, spectral, params).map_err(abort)?;
        let mut s2 = combine(&state, 0.75, &s1, 0.25, &r1, dt);
        clamps += clamp(&mut s2);
        let r2 = limit_rhs(&s2, spectral, params).map_err(abort)?;
        let mut next = combine(&state, 1.0 / 3.0, &s2, 2.0 / 3.0, &r2, dt);
        next.u = project_divfree(&next.u, spectral);
        clamps += clamp(&mut next);
        if next.validate().is_err()
            || next.u.iter().chain([&next.k]).any(|c| c.iter().any(|x| x.abs() > 1e12))
        {
            return Err(abort(Error::Numerical("limit solution blew up")));
        }
        steps += 1;
        time = if time + dt >= controls.t_final { controls.t_final } else { time + dt };
        next.pi = limit_rhs(&next, spectral, params).map_err(abort)?.pi;
        max_div = max_div.max(max_divergence(&next.u, spectral));
        state = next;
    }
    Ok(LimitTrajectory { state, time, steps, max_divergence: max_div, clamps })
}

/// Quasi-equilibrium stress of the rescaled system,
/// `-(sqrt(eps) / (2 rho0)) (nu_T + nu) (grad u + grad u^T)`, per cell.
pub fn prepared_stress(state: &IncompressibleState, spectral: &Spectral, params: &ModelParams) -> Result<Vec<Sym6>> {
    let nu_t = eddy_viscosities(&state.k, params)?;
    let grad = velocity_gradient(&state.u, spectral);
    let f = sqrt(params.epsilon) / params.eos.rho0;
    Ok((0..nu_t.len())
        .map(|c| {
            let g: [[f64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| grad[i][j][c]));
            Sym6::twice_strain(&g).scale(-0.5 * f * (nu_t[c] + params.nu))
        })
        .collect())
}

/// Quasi-equilibrium flux `-(sqrt(eps) xi alpha3 / rho0) (nu_T + nu) grad k`, per cell.
pub fn prepared_flux(state: &IncompressibleState, spectral: &Spectral, params: &ModelParams) -> Result<Vec<[f64; 3]>> {
    let nu_t = eddy_viscosities(&state.k, params)?;
    let [gx, gy] = spectral.gradient(&state.k);
    let f = sqrt(params.epsilon) * params.xi * params.alpha3 / params.eos.rho0;
    Ok((0..nu_t.len())
        .map(|c| {
            let s = -f * (nu_t[c] + params.nu);
            [s * gx[c], s * gy[c], 0.0]
        })
        .collect())
}

/// Compressible state at `params.epsilon` built from a limit solution:
/// `phi = eps pi`, `u`, `k` copied, `sigma` and `y` at their quasi-equilibria.
pub fn well_prepared_initial_data(
    state: &IncompressibleState,
    spectral: &Spectral,
    params: &ModelParams,
) -> Result<Field> {
    params.validate()?;
    state.validate()?;
    let sigma = prepared_stress(state, spectral, params)?;
    let y = prepared_flux(state, spectral, params)?;
    let cells = (0..state.k.len())
        .map(|c| RescaledState {
            phi: params.epsilon * state.pi[c],
            u: [state.u[0][c], state.u[1][c], state.u[2][c]],
            sigma: sigma[c],
            k: state.k[c],
            y: y[c],
        })
        .collect();
    Field::new(*spectral.grid(), cells)
}
