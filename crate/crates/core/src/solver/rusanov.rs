//! First-order path-conservative Rusanov update of the quasilinear system.

use alloc::vec;
use alloc::vec::Vec;

use super::clamp_k;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::{apply_with_coeffs, JacobianCoeffs, ModelParams, RescaledState, NVAR};

/// Unit direction of a grid axis.
pub(crate) fn axis_dir(axis: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    e
}

/// Per-cell `|u_axis| + acoustic_radius` for each active axis.
pub(crate) fn axis_speeds(field: &Field, params: &ModelParams) -> Result<Vec<[f64; 2]>> {
    field
        .cells
        .iter()
        .map(|c| {
            let r = JacobianCoeffs::new(c.phi, params)?.acoustic_radius();
            let s = [c.u[0].abs() + r, c.u[1].abs() + r];
            if !(s[0].is_finite() && s[1].is_finite()) {
                return Err(Error::Numerical("non-finite wave speed"));
            }
            Ok(s)
        })
        .collect()
}

/// Largest stable step for explicit transport with stability number `limit`:
/// `dt * max_cells sum_axes lambda_a / dx_a <= limit`.
pub(crate) fn stable_dt(field: &Field, speeds: &[[f64; 2]], limit: f64) -> f64 {
    let g = &field.grid;
    let rate = speeds
        .iter()
        .map(|s| (0..g.dim).map(|a| s[a] / g.spacing(a)).sum::<f64>())
        .fold(0.0_f64, f64::max);
    limit / rate
}

/// One Rusanov step of length `dt`. Returns the new field and the number of
/// cells whose `k` was clamped at zero.
///
/// Each interface contributes the fluctuations
/// `D^-+ = 1/2 A(U_avg, e) (U_R - U_L) -+ 1/2 lambda (U_R - U_L)` to its left
/// and right cells.
pub fn hyperbolic_substep(field: &Field, params: &ModelParams, dt: f64) -> Result<(Field, usize)> {
    let g = field.grid;
    let speeds = axis_speeds(field, params)?;
    let dt_max = stable_dt(field, &speeds, 1.0);
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::StepRejected { dt, dt_max });
    }
    let states: Vec<[f64; NVAR]> = field.cells.iter().map(RescaledState::to_array).collect();
    let mut update = vec![[0.0; NVAR]; states.len()];

    for axis in 0..g.dim {
        let zeta = axis_dir(axis);
        let ratio = dt / g.spacing(axis);
        for left in 0..states.len() {
            let right = g.neighbor(left, axis, 1);
            let (ul, ur) = (&states[left], &states[right]);
            let jump: [f64; NVAR] = core::array::from_fn(|i| ur[i] - ul[i]);
            let phi_avg = 0.5 * (ul[0] + ur[0]);
            let vel_avg = [0.5 * (ul[1] + ur[1]), 0.5 * (ul[2] + ur[2]), 0.5 * (ul[3] + ur[3])];
            let coeffs = JacobianCoeffs::new(phi_avg, params)?;
            let a_jump = apply_with_coeffs(&coeffs, &vel_avg, &zeta, &jump);
            let lambda = speeds[left][axis].max(speeds[right][axis]);
            for i in 0..NVAR {
                let minus = 0.5 * (a_jump[i] - lambda * jump[i]);
                let plus = 0.5 * (a_jump[i] + lambda * jump[i]);
                update[left][i] -= ratio * minus;
                update[right][i] -= ratio * plus;
            }
        }
    }

    let mut cells: Vec<RescaledState> = states
        .iter()
        .zip(update.iter())
        .map(|(s, d)| RescaledState::from_array(&core::array::from_fn(|i| s[i] + d[i])))
        .collect();
    let clamps = clamp_k(&mut cells);
    let out = Field { grid: g, cells };
    if !out.is_finite() {
        return Err(Error::Numerical("transport produced a non-finite state"));
    }
    Ok((out, clamps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::math::{exp, sin};
    use crate::solver::cfl_dt;
    use core::f64::consts::PI;

    #[test]
    fn uniform_field_is_a_fixed_point() {
        let g = Grid::new_2d(6, 5, 1.0, 2.0).unwrap();
        let s = RescaledState {
            phi: 0.1,
            u: [0.3, -0.2, 0.1],
            k: 0.7,
            y: [0.1, 0.2, 0.3],
            ..Default::default()
        };
        let f = Field::uniform(g, s);
        let p = ModelParams { epsilon: 0.5, ..Default::default() };
        let dt = cfl_dt(&f, &p, 0.4).unwrap();
        let (out, clamps) = hyperbolic_substep(&f, &p, dt).unwrap();
        assert_eq!(out, f);
        assert_eq!(clamps, 0);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let f = Field::uniform(g, RescaledState { k: 1.0, ..Default::default() });
        let p = ModelParams::default();
        let dt = cfl_dt(&f, &p, 0.9).unwrap();
        assert!(matches!(hyperbolic_substep(&f, &p, 1.5 * dt / 0.9), Err(Error::StepRejected { .. })));
    }

    #[test]
    fn acoustic_pulse_travels_at_sound_speed() {
        // At small eps the phi-u block dominates the fast speed: sqrt(1/(eps^2 q rho)) = c/eps.
        let eps = 0.05;
        let p = ModelParams { epsilon: eps, ..Default::default() };
        let n = 256;
        let g = Grid::new_1d(n, 1.0).unwrap();
        let (rho, q) = p.rho_q(0.0).unwrap();
        let speed = (1.0 / (eps * eps * q * rho)).sqrt();
        assert!((speed - 1.0 / eps).abs() < 1e-9);
        // right-going simple wave of the phi-u block: u = eps q speed phi
        let gain = eps * q * speed;
        let mut f = Field::from_fn(g, |x, _| {
            let phi = 1e-3 * exp(-((x - 0.3) / 0.03).powi(2));
            RescaledState { phi, u: [gain * phi, 0.0, 0.0], ..Default::default() }
        });
        let t_end = 0.3 / speed;
        let mut t = 0.0;
        while t < t_end {
            let dt = cfl_dt(&f, &p, 0.8).unwrap().min(t_end - t);
            f = hyperbolic_substep(&f, &p, dt).unwrap().0;
            t += dt;
        }
        let phi = f.component(0);
        let imax = (0..n).max_by(|&a, &b| phi[a].total_cmp(&phi[b])).unwrap();
        let measured = (g.center(imax).0 - 0.3) / t;
        assert!((measured / speed - 1.0).abs() < 0.1, "measured {measured}, expected {speed}");
    }

    #[test]
    fn linear_energy_does_not_grow() {
        // Small perturbations of rest: the A0-weighted l2 norm is non-increasing.
        let g = Grid::new_1d(64, 1.0).unwrap();
        let p = ModelParams::default();
        let base = RescaledState { k: 1.0, ..Default::default() };
        let a0 = crate::model::symmetrizer_diagonal(&base, &p).unwrap();
        let energy = |f: &Field| {
            f.cells
                .iter()
                .map(|c| {
                    let (a, b) = (c.to_array(), base.to_array());
                    (0..NVAR).map(|i| a0[i] * (a[i] - b[i]).powi(2)).sum::<f64>()
                })
                .sum::<f64>()
        };
        let mut f = Field::from_fn(g, |x, _| RescaledState {
            phi: 1e-6 * sin(2.0 * PI * x),
            u: [0.0, 1e-6 * crate::math::cos(4.0 * PI * x), 0.0],
            ..base
        });
        let mut e = energy(&f);
        for _ in 0..50 {
            let dt = cfl_dt(&f, &p, 0.5).unwrap();
            f = hyperbolic_substep(&f, &p, dt).unwrap().0;
            let e1 = energy(&f);
            assert!(e1 <= e * (1.0 + 1e-6));
            e = e1;
        }
    }
}
