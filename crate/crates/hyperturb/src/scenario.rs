//! Initial conditions named in the configuration.

use std::f64::consts::TAU;

use hyperturb_core::incompressible::{well_prepared_initial_data, IncompressibleState};
use hyperturb_core::spectral::Spectral;
use hyperturb_core::{Field, Grid, ModelParams, RescaledState, Result};

use crate::config::{InitKind, InitSettings};

fn sample(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..grid.n_cells())
        .map(|c| {
            let (x, y) = grid.center(c);
            f(x, y)
        })
        .collect()
}

/// Incompressible state for the flow-type initial conditions.
///
/// With `X = 2 pi x / lx`, `Y = 2 pi y / ly` and amplitude `A`:
/// * shear layer: `u = A (sin Y, 0.2 sin X, 0)`, `k = 1 + 0.2 cos X cos Y`;
/// * Taylor-Green: `u = A (sin X cos Y, -cos X sin Y, 0)`, `k = 1`;
/// * rest and acoustic pulse: `u = 0`, `k = 0` (the pulse has no
///   incompressible counterpart).
pub fn limit_state(init: &InitSettings, spectral: &Spectral, params: &ModelParams) -> Result<IncompressibleState> {
    let g = spectral.grid();
    let (kx, ky) = (TAU / g.lx, TAU / g.ly);
    let a = init.amplitude;
    let zero = || vec![0.0; g.n_cells()];
    let (u, k) = match init.kind {
        InitKind::ShearLayer => (
            [sample(g, |_, y| a * (ky * y).sin()), sample(g, |x, _| 0.2 * a * (kx * x).sin()), zero()],
            sample(g, |x, y| 1.0 + 0.2 * (kx * x).cos() * (ky * y).cos()),
        ),
        InitKind::TaylorGreen => (
            [
                sample(g, |x, y| a * (kx * x).sin() * (ky * y).cos()),
                sample(g, |x, y| -a * (kx * x).cos() * (ky * y).sin()),
                zero(),
            ],
            vec![1.0; g.n_cells()],
        ),
        InitKind::Rest | InitKind::AcousticPulse => ([zero(), zero(), zero()], zero()),
    };
    IncompressibleState::new(u, k, spectral, params)
}

/// Compressible initial field at `params.epsilon`.
///
/// Rest is the zero state. The acoustic pulse is a Gaussian bump of height
/// `A` in `phi` centred at `x = lx / 2` with width `lx / 20`, on fluid at
/// rest with `k = 1` (at `k = 0` transport pushes `k` below zero).
/// The flow cases are the well-prepared data of [`limit_state`].
pub fn initial_field(init: &InitSettings, grid: &Grid, params: &ModelParams) -> Result<Field> {
    match init.kind {
        InitKind::Rest => Ok(Field::uniform(*grid, RescaledState::default())),
        InitKind::AcousticPulse => {
            let (x0, w) = (0.5 * grid.lx, grid.lx / 20.0);
            Ok(Field::from_fn(*grid, |x, _| RescaledState {
                phi: init.amplitude * (-((x - x0) / w).powi(2)).exp(),
                k: 1.0,
                ..Default::default()
            }))
        }
        InitKind::ShearLayer | InitKind::TaylorGreen => {
            let sp = Spectral::new(grid);
            well_prepared_initial_data(&limit_state(init, &sp, params)?, &sp, params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperturb_core::incompressible::max_divergence;

    fn grid() -> Grid {
        Grid::new_2d(16, 16, TAU, TAU).unwrap()
    }

    #[test]
    fn rest_is_zero() {
        let f = initial_field(&InitSettings::default(), &grid(), &ModelParams::default()).unwrap();
        assert!(f.cells.iter().all(|c| *c == RescaledState::default()));
    }

    #[test]
    fn pulse_peaks_mid_domain() {
        let g = Grid::new_1d(64, 2.0).unwrap();
        let init = InitSettings { kind: InitKind::AcousticPulse, amplitude: 0.01 };
        let f = initial_field(&init, &g, &ModelParams::default()).unwrap();
        let phi = f.component(0);
        let imax = (0..64).max_by(|&a, &b| phi[a].total_cmp(&phi[b])).unwrap();
        assert!((g.center(imax).0 - 1.0).abs() <= g.dx());
        assert!(phi[imax] <= 0.01 && phi[imax] > 0.009);
        assert!(f.cells.iter().all(|c| c.u == [0.0; 3] && c.k == 1.0));
    }

    #[test]
    fn flow_states_are_divergence_free_and_prepared() {
        let p = ModelParams { epsilon: 0.1, ..Default::default() };
        let sp = Spectral::new(&grid());
        for kind in [InitKind::ShearLayer, InitKind::TaylorGreen] {
            let init = InitSettings { kind, amplitude: 1.0 };
            let s = limit_state(&init, &sp, &p).unwrap();
            assert!(max_divergence(&s.u, &sp) < 1e-12);
            let f = initial_field(&init, &grid(), &p).unwrap();
            for (c, cell) in f.cells.iter().enumerate() {
                assert!((cell.phi - 0.1 * s.pi[c]).abs() < 1e-14);
                assert_eq!(cell.k, s.k[c]);
            }
            assert!(f.cells.iter().any(|c| c.sigma.norm_sq() > 0.0));
        }
    }

    #[test]
    fn shear_layer_profile() {
        let sp = Spectral::new(&grid());
        let init = InitSettings { kind: InitKind::ShearLayer, amplitude: 0.5 };
        let s = limit_state(&init, &sp, &ModelParams::default()).unwrap();
        let g = sp.grid();
        for c in 0..g.n_cells() {
            let (x, y) = g.center(c);
            assert!((s.u[0][c] - 0.5 * y.sin()).abs() < 1e-13);
            assert!((s.u[1][c] - 0.1 * x.sin()).abs() < 1e-13);
            assert!((s.k[c] - 1.0 - 0.2 * x.cos() * y.cos()).abs() < 1e-15);
        }
    }
}
