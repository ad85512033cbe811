//! Distance between compressible solutions and the incompressible limit, and
//! the low-Mach convergence study built on it.

use alloc::vec::Vec;

use super::fit::fit_order;
use super::norms::discrete_norm;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::incompressible::{prepared_flux, prepared_stress, well_prepared_initial_data, IncompressibleState};
use crate::math::sqrt;
use crate::model::{eddy_viscosity, ModelParams, Sym6};
use crate::solver::{run_simulation, TimeControls, Trajectory};
use crate::spectral::Spectral;

/// Core and relaxation error groups at one norm order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremError {
    /// `||(phi - eps pi, u - u_ref, k - k_ref)||_m`.
    pub core: f64,
    /// `||(rho0 sigma - rho0 sigma_q, rho0 y - rho0 y_q)||_m` with the
    /// quasi-equilibria built from the reference solution.
    pub relax: f64,
}

fn sym_components(s: &[Sym6]) -> [Vec<f64>; 6] {
    // orthonormal coordinates so the Euclidean sum is the tensor norm
    core::array::from_fn(|i| s.iter().map(|t| t.orthonormal()[i]).collect())
}

/// Theorem error of `field` (at time `time`) against `reference` (at
/// `reference_time`), using `params.epsilon`.
pub fn theorem_error(
    field: &Field,
    time: f64,
    reference: &IncompressibleState,
    reference_time: f64,
    spectral: &Spectral,
    params: &ModelParams,
    m: usize,
) -> Result<TheoremError> {
    if field.grid != *spectral.grid() || reference.k.len() != field.cells.len() {
        return Err(Error::Usage("compressible and reference grids differ"));
    }
    if (time - reference_time).abs() > 1e-12 * time.abs().max(1.0) {
        return Err(Error::Usage("compressible and reference times differ"));
    }
    let e = params.epsilon;
    let rho0 = params.eos.rho0;
    let cells = &field.cells;
    let n = cells.len();

    let mut core_parts: Vec<Vec<f64>> = Vec::with_capacity(5);
    core_parts.push((0..n).map(|c| cells[c].phi - e * reference.pi[c]).collect());
    for i in 0..3 {
        core_parts.push((0..n).map(|c| cells[c].u[i] - reference.u[i][c]).collect());
    }
    core_parts.push((0..n).map(|c| cells[c].k - reference.k[c]).collect());

    let sq = prepared_stress(reference, spectral, params)?;
    let yq = prepared_flux(reference, spectral, params)?;
    let ds: Vec<Sym6> = (0..n)
        .map(|c| Sym6(core::array::from_fn(|i| rho0 * (cells[c].sigma.0[i] - sq[c].0[i]))))
        .collect();
    let mut relax_parts: Vec<Vec<f64>> = sym_components(&ds).into_iter().collect();
    for i in 0..3 {
        relax_parts.push((0..n).map(|c| rho0 * (cells[c].y[i] - yq[c][i])).collect());
    }

    fn as_refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|x| x.as_slice()).collect()
    }
    Ok(TheoremError {
        core: discrete_norm(&as_refs(&core_parts), &field.grid, m)?,
        relax: discrete_norm(&as_refs(&relax_parts), &field.grid, m)?,
    })
}

/// Distance of `sigma` and `y` from the quasi-equilibria
/// `-(sqrt(eps)(nu_T+nu)/(2 rho))(grad u + grad u^T)` and
/// `-(sqrt(eps) xi alpha3 (nu_T+nu)/rho) grad k` assembled from the field's
/// own `u`, `k` and `rho`, in the `m = 0` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellResidual {
    pub sigma: f64,
    pub y: f64,
    pub sigma_quasi: f64,
    pub y_quasi: f64,
}

impl MaxwellResidual {
    pub fn sigma_relative(&self) -> f64 {
        self.sigma / self.sigma_quasi
    }

    pub fn y_relative(&self) -> f64 {
        self.y / self.y_quasi
    }
}

pub fn maxwell_residual(field: &Field, params: &ModelParams) -> Result<MaxwellResidual> {
    let sp = Spectral::new(&field.grid);
    let comps = field.components();
    let grads: Vec<[Vec<f64>; 2]> = (1..4).map(|i| sp.gradient(&comps[i])).collect();
    let grad_k = sp.gradient(&comps[crate::model::K]);
    let se = sqrt(params.epsilon);
    let n = field.cells.len();
    let mut sq = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    let mut yq = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut dy = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for (c, cell) in field.cells.iter().enumerate() {
        let (rho, _) = params.rho_q(cell.phi)?;
        let (nu_t, _) = eddy_viscosity(cell.k, params)?;
        let visc = nu_t + params.nu;
        let g: [[f64; 3]; 3] = core::array::from_fn(|i| {
            core::array::from_fn(|j| if j < 2 { grads[i][j][c] } else { 0.0 })
        });
        let s = Sym6::twice_strain(&g).scale(-se * visc / (2.0 * rho));
        ds.push(Sym6(core::array::from_fn(|i| cell.sigma.0[i] - s.0[i])));
        sq.push(s);
        let f = -se * params.xi * params.alpha3 * visc / rho;
        for i in 0..3 {
            let gk = if i < 2 { grad_k[i][c] } else { 0.0 };
            yq[i].push(f * gk);
            dy[i].push(cell.y[i] - f * gk);
        }
    }
    let g = &field.grid;
    let norm6 = |s: &[Sym6]| {
        let parts = sym_components(s);
        discrete_norm(&parts.each_ref().map(|v| v.as_slice()), g, 0)
    };
    let norm3 = |v: &[Vec<f64>; 3]| discrete_norm(&v.each_ref().map(|x| x.as_slice()), g, 0);
    Ok(MaxwellResidual { sigma: norm6(&ds)?, y: norm3(&dy)?, sigma_quasi: norm6(&sq)?, y_quasi: norm3(&yq)? })
}

/// Outcome of one compressible run of the low-Mach study.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub epsilon: f64,
    /// Errors at norm orders 0 and 1.
    pub errors: [TheoremError; 2],
    pub steps: usize,
    pub clamps: usize,
    pub entropy_decreases: usize,
    pub constraint_violations: usize,
    pub min_production: f64,
}

/// Tolerance of the per-step entropy monotonicity check.
pub const ENTROPY_REL_TOL: f64 = 1e-8;

/// Prepare data from `reference_initial` at `eps`, integrate to
/// `controls.t_final` and compare with `reference_final` (the limit solution
/// at the same time).
pub fn run_sweep_case(
    reference_initial: &IncompressibleState,
    reference_final: &IncompressibleState,
    spectral: &Spectral,
    params: &ModelParams,
    eps: f64,
    controls: &TimeControls,
) -> Result<(SweepCase, Trajectory)> {
    let p = params.with_epsilon(eps);
    let initial = well_prepared_initial_data(reference_initial, spectral, &p)?;
    let tr = run_simulation(&initial, &p, controls)?;
    let e0 = theorem_error(&tr.field, tr.time, reference_final, controls.t_final, spectral, &p, 0)?;
    let e1 = theorem_error(&tr.field, tr.time, reference_final, controls.t_final, spectral, &p, 1)?;
    let case = SweepCase {
        epsilon: eps,
        errors: [e0, e1],
        steps: tr.steps,
        clamps: tr.clamp_count(),
        entropy_decreases: tr.entropy_decreases(ENTROPY_REL_TOL),
        constraint_violations: tr.log.iter().map(|r| r.totals.constraint_violations).sum(),
        min_production: tr.log.iter().map(|r| r.totals.min_production).fold(f64::INFINITY, f64::min),
    };
    Ok((case, tr))
}

/// Fitted rates of the low-Mach study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub cases: Vec<SweepCase>,
    /// Slope of the core error at norm orders 0 and 1.
    pub core_slope: [f64; 2],
    pub relax_slope: [f64; 2],
    /// Relaxation error (order 0) strictly decreasing along the eps list.
    pub relax_monotone: bool,
    /// `core_slope[0] >= MIN_CORE_SLOPE` and `relax_monotone`.
    pub passed: bool,
}

pub const MIN_CORE_SLOPE: f64 = 0.8;

pub fn convergence_report(cases: Vec<SweepCase>) -> Result<ConvergenceReport> {
    let eps: Vec<f64> = cases.iter().map(|c| c.epsilon).collect();
    let fit = |f: &dyn Fn(&SweepCase) -> f64| {
        let errs: Vec<f64> = cases.iter().map(f).collect();
        fit_order(&eps, &errs).map(|(s, _)| s)
    };
    let core_slope = [fit(&|c| c.errors[0].core)?, fit(&|c| c.errors[1].core)?];
    let relax_slope = [fit(&|c| c.errors[0].relax)?, fit(&|c| c.errors[1].relax)?];
    let relax_monotone = cases.windows(2).all(|w| w[1].errors[0].relax < w[0].errors[0].relax);
    let passed = core_slope[0] >= MIN_CORE_SLOPE && relax_monotone;
    Ok(ConvergenceReport { cases, core_slope, relax_slope, relax_monotone, passed })
}
