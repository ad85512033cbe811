//! Time integration of the rescaled system on periodic grids.
//!
//! A step is `relax(dt/2) . transport(dt) . relax(dt/2)`. Transport is the
//! Rusanov finite-volume update or, for low-Mach studies, a pseudo-spectral
//! RK4 update; relaxation is solved cell by cell with `nu_T` frozen.

mod relaxation;
mod rusanov;
mod spectral_transport;

pub use relaxation::{relax_cell, relaxation_substep};
pub use rusanov::hyperbolic_substep;
pub use spectral_transport::spectral_substep;

use alloc::vec::Vec;

use crate::diagnostics::{field_totals, FieldTotals};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::{eddy_viscosity, ModelParams, RescaledState};
use crate::spectral::Spectral;

/// Spatial discretization of the transport substep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportScheme {
    #[default]
    Rusanov,
    Spectral,
}

/// Treatment of the stiff source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationStrategy {
    /// Exact exponentials for `sigma`, `y`; sub-stepped or analytic `k`.
    #[default]
    Exponential,
    /// Transport only.
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    pub t_final: f64,
    pub max_steps: usize,
    pub scheme: TransportScheme,
    pub relaxation: RelaxationStrategy,
    /// Caps `dt` at this fraction of the shortest relaxation time
    /// `eps min(alpha1, alpha3) (nu_T + nu)`. The Strang fixed point misses the
    /// quasi-equilibrium by roughly `(dt / tau)^2 / 12`.
    pub relax_dt_fraction: Option<f64>,
    /// Times at which the field is saved, ascending.
    pub snapshot_times: Vec<f64>,
}

impl Default for TimeControls {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            t_final: 0.1,
            max_steps: 1_000_000,
            scheme: TransportScheme::Rusanov,
            relaxation: RelaxationStrategy::Exponential,
            relax_dt_fraction: None,
            snapshot_times: Vec::new(),
        }
    }
}

impl TimeControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config("cfl must be in (0, 1)"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config("t_final must be >= 0"));
        }
        if let Some(f) = self.relax_dt_fraction {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::Config("relax_dt_fraction must be > 0"));
            }
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("snapshot times must be >= 0"));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("snapshot times must be strictly increasing"));
        }
        Ok(())
    }
}

/// `cfl * min over cells and axes of dx / lambda_max(U, e_axis)`.
pub fn cfl_dt(field: &Field, params: &ModelParams, cfl: f64) -> Result<f64> {
    if field.cells.is_empty() {
        return Err(Error::Usage("empty field"));
    }
    let speeds = rusanov::axis_speeds(field, params)?;
    let g = &field.grid;
    let mut dt = f64::INFINITY;
    for s in &speeds {
        for axis in 0..g.dim {
            dt = dt.min(g.spacing(axis) / s[axis]);
        }
    }
    let dt = cfl * dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Numerical("non-finite wave speed"));
    }
    Ok(dt)
}

/// Shortest local relaxation time `eps min(alpha1, alpha3) (nu_T + nu)`.
pub fn min_relaxation_time(field: &Field, params: &ModelParams) -> Result<f64> {
    let mut kmin = f64::INFINITY;
    for c in &field.cells {
        kmin = kmin.min(c.k);
    }
    let (nu_t, _) = eddy_viscosity(kmin.max(0.0), params)?;
    Ok(params.epsilon * params.alpha1.min(params.alpha3) * (nu_t + params.nu))
}

/// Clamp negative `k` to zero, returning how many cells were touched.
pub(crate) fn clamp_k(cells: &mut [RescaledState]) -> usize {
    let mut n = 0;
    for c in cells.iter_mut() {
        if c.k < 0.0 {
            c.k = 0.0;
            n += 1;
        }
    }
    n
}

/// Reusable per-grid state for the transport substep.
pub struct Stepper {
    params: ModelParams,
    scheme: TransportScheme,
    relaxation: RelaxationStrategy,
    spectral: Option<Spectral>,
}

impl Stepper {
    pub fn new(field: &Field, params: &ModelParams, scheme: TransportScheme, relaxation: RelaxationStrategy) -> Self {
        let spectral = match scheme {
            TransportScheme::Spectral => Some(Spectral::new(&field.grid)),
            TransportScheme::Rusanov => None,
        };
        Self { params: *params, scheme, relaxation, spectral }
    }

    pub fn transport(&self, field: &Field, dt: f64) -> Result<(Field, usize)> {
        match (&self.scheme, &self.spectral) {
            (TransportScheme::Spectral, Some(sp)) => spectral_substep(field, &self.params, dt, sp),
            _ => hyperbolic_substep(field, &self.params, dt),
        }
    }

    /// One Strang step; returns the new field and the number of k-clamps.
    pub fn strang(&self, field: &Field, dt: f64) -> Result<(Field, usize)> {
        if self.relaxation == RelaxationStrategy::Off {
            return self.transport(field, dt);
        }
        let (f, c1) = relaxation_substep(field, &self.params, 0.5 * dt)?;
        let (f, c2) = self.transport(&f, dt)?;
        let (f, c3) = relaxation_substep(&f, &self.params, 0.5 * dt)?;
        Ok((f, c1 + c2 + c3))
    }
}

/// `relaxation(dt/2) . hyperbolic(dt) . relaxation(dt/2)` with Rusanov transport.
pub fn strang_step(field: &Field, params: &ModelParams, dt: f64) -> Result<Field> {
    let stepper = Stepper::new(field, params, TransportScheme::Rusanov, RelaxationStrategy::Exponential);
    Ok(stepper.strang(field, dt)?.0)
}

/// Diagnostics recorded after every step (and for the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub totals: FieldTotals,
    /// k-clamp events during this step.
    pub clamps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub field: Field,
    pub time: f64,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
    pub log: Vec<StepRecord>,
}

impl Trajectory {
    pub fn clamp_count(&self) -> usize {
        self.log.iter().map(|r| r.clamps).sum()
    }

    /// Number of steps whose total entropy dropped by more than
    /// `rel_tol * |S|`, with `S` the entropy before the step.
    pub fn entropy_decreases(&self, rel_tol: f64) -> usize {
        self.log
            .windows(2)
            .filter(|w| {
                let (a, b) = (w[0].totals.entropy, w[1].totals.entropy);
                b < a - rel_tol * a.abs()
            })
            .count()
    }
}

const BLOW_UP: f64 = 1e12;

/// Integrate `initial` to `controls.t_final` (or `max_steps`).
///
/// The last step and steps that would overshoot a snapshot time are
/// shortened to land on it exactly.
pub fn run_simulation(initial: &Field, params: &ModelParams, controls: &TimeControls) -> Result<Trajectory> {
    params.validate()?;
    controls.validate()?;
    initial.grid.validate()?;
    if initial.cells.len() != initial.grid.n_cells() {
        return Err(Error::Usage("cell count does not match grid"));
    }
    for c in &initial.cells {
        c.validate(params)?;
    }
    let stepper = Stepper::new(initial, params, controls.scheme, controls.relaxation);
    let mut field = initial.clone();
    let mut time = 0.0;
    let mut step = 0;
    let mut log = Vec::new();
    log.push(StepRecord { step: 0, time, dt: 0.0, totals: field_totals(&field, params)?, clamps: 0 });

    let mut snapshots = Vec::new();
    let mut pending = controls.snapshot_times.iter().copied().peekable();
    while let Some(&ts) = pending.peek() {
        if ts > 0.0 {
            break;
        }
        snapshots.push(Snapshot { time: 0.0, field: field.clone() });
        pending.next();
    }

    while time < controls.t_final && step < controls.max_steps {
        let next_step = step + 1;
        let abort = |e: Error| Error::aborted(next_step, e);
        let mut dt = cfl_dt(&field, params, controls.cfl).map_err(abort)?;
        if let Some(f) = controls.relax_dt_fraction {
            dt = dt.min(f * min_relaxation_time(&field, params).map_err(abort)?);
        }
        let target = match pending.peek() {
            Some(&ts) if ts < controls.t_final => ts,
            _ => controls.t_final,
        };
        let lands = time + dt >= target * (1.0 - 1e-14);
        if lands {
            dt = target - time;
        }
        let (next, clamps) = stepper.strang(&field, dt).map_err(abort)?;
        if !next.is_finite() || next.max_abs() > BLOW_UP {
            return Err(abort(Error::Numerical("state magnitude exceeded 1e12")));
        }
        field = next;
        step += 1;
        time = if lands { target } else { time + dt };
        log.push(StepRecord { step, time, dt, totals: field_totals(&field, params).map_err(abort)?, clamps });
        while let Some(&ts) = pending.peek() {
            if ts > time {
                break;
            }
            snapshots.push(Snapshot { time, field: field.clone() });
            pending.next();
        }
    }
    Ok(Trajectory { field, time, steps: step, snapshots, log })
}

/// Evolve only `sigma` and `y` over `controls.t_final`, holding `phi`, `u`
/// and `k` at their initial values: after every step those are reset.
pub fn run_frozen_flow(initial: &Field, params: &ModelParams, controls: &TimeControls) -> Result<Field> {
    params.validate()?;
    controls.validate()?;
    let stepper = Stepper::new(initial, params, controls.scheme, controls.relaxation);
    let mut field = initial.clone();
    let mut time = 0.0;
    let mut step = 0;
    while time < controls.t_final && step < controls.max_steps {
        let next_step = step + 1;
        let abort = |e: Error| Error::aborted(next_step, e);
        let mut dt = cfl_dt(&field, params, controls.cfl).map_err(abort)?;
        if let Some(f) = controls.relax_dt_fraction {
            dt = dt.min(f * min_relaxation_time(&field, params).map_err(abort)?);
        }
        let lands = time + dt >= controls.t_final * (1.0 - 1e-14);
        if lands {
            dt = controls.t_final - time;
        }
        let (mut next, _) = stepper.strang(&field, dt).map_err(abort)?;
        for (c, frozen) in next.cells.iter_mut().zip(&initial.cells) {
            c.phi = frozen.phi;
            c.u = frozen.u;
            c.k = frozen.k;
        }
        field = next;
        step += 1;
        time = if lands { controls.t_final } else { time + dt };
    }
    Ok(field)
}
