//! Randomized check of the structural properties of the model: symmetric
//! hyperbolicity, concave entropy and nonnegative entropy production.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SquareMatrix14;
use crate::math::{cos, sin, sqrt};
use crate::model::{
    cdf_variables, dissipation_matrix, entropy_production, flux_jacobian, pd_constraint_ratio,
    specific_entropy_cdf, symmetrizer, unscale_map, wave_speeds, CdfState, ModelParams, RescaledState, Sym6,
};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PRODUCTION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Symmetry,
    Spectrum,
    Production,
    PdConsistency,
    Concavity,
    /// The sample could not be evaluated at all (inadmissible state).
    Evaluation,
}

/// One violation: which check, which sample, and the offending value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub check: Check,
    pub sample: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub samples: usize,
    /// Samples whose dissipation constraint held.
    pub constrained: usize,
    pub worst_asymmetry: f64,
    pub min_production: f64,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn count(&self, check: Check) -> usize {
        self.violations.iter().filter(|v| v.check == check).count()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sample_state(rng: &mut ChaCha8Rng, params: &ModelParams) -> RescaledState {
    // keep p0 + eps phi >= p0 / 2
    let phi_max = 0.5 * (params.eos.p0() / params.epsilon).min(1.0);
    let mut u: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let n = sqrt(u.iter().map(|x| x * x).sum::<f64>());
    if n > 1.0 {
        u = u.map(|x| x / n);
    }
    RescaledState {
        phi: rng.gen_range(-phi_max..=phi_max),
        u,
        sigma: Sym6(core::array::from_fn(|_| rng.gen_range(-0.3..=0.3))),
        k: rng.gen_range(0.0..=2.0),
        y: core::array::from_fn(|_| rng.gen_range(-0.5..=0.5)),
    }
}

fn sample_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let t: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    let r = sqrt((1.0 - z * z).max(0.0));
    [r * cos(t), r * sin(t), z]
}

/// Relative asymmetry of `A0 A(U, n)`.
fn symmetry_defect(state: &RescaledState, n: &[f64; 3], params: &ModelParams) -> Option<f64> {
    let a = flux_jacobian(state, n, params).ok()?;
    let a0: SquareMatrix14 = symmetrizer(state, params).ok()?;
    let s = a0 * a;
    let scale = s.norm_inf();
    Some(if scale > 0.0 { s.asymmetry_inf() / scale } else { 0.0 })
}

fn cdf_to_array(c: &CdfState) -> [f64; 14] {
    let mut a = [0.0; 14];
    a[0] = c.v;
    a[1..4].copy_from_slice(&c.u);
    a[4..10].copy_from_slice(&c.c.0);
    a[10] = c.w;
    a[11..14].copy_from_slice(&c.y);
    a
}

fn cdf_from_array(a: &[f64; 14]) -> CdfState {
    CdfState {
        v: a[0],
        u: [a[1], a[2], a[3]],
        c: Sym6([a[4], a[5], a[6], a[7], a[8], a[9]]),
        w: a[10],
        y: [a[11], a[12], a[13]],
    }
}

/// Largest eigenvalue of the finite-difference Hessian of the specific
/// entropy in the variables `(v, u, C, w, y)`, scaled by the Hessian's size.
/// Negative for a strictly concave entropy.
fn concavity_defect(cdf: &CdfState, params: &ModelParams) -> Option<f64> {
    let x0 = cdf_to_array(cdf);
    let s = |x: &[f64; 14]| specific_entropy_cdf(&cdf_from_array(x), params).ok();
    let f0 = s(&x0)?;
    let h: [f64; 14] = core::array::from_fn(|i| 1e-4 * x0[i].abs().max(if i == 0 { x0[0] } else { 1.0 }));
    let mut hess = SquareMatrix14::zeros();
    for i in 0..14 {
        for j in i..14 {
            let val = if i == j {
                let mut p = x0;
                let mut m = x0;
                p[i] += h[i];
                m[i] -= h[i];
                (s(&p)? - 2.0 * f0 + s(&m)?) / (h[i] * h[i])
            } else {
                let at = |di: f64, dj: f64| {
                    let mut x = x0;
                    x[i] += di * h[i];
                    x[j] += dj * h[j];
                    s(&x)
                };
                (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h[i] * h[j])
            };
            hess[(i, j)] = val;
            hess[(j, i)] = val;
        }
    }
    let eig = hess.symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    Some(eig[13] / scale)
}

/// `n_samples` random admissible states and unit directions, checked for
/// every structural property. Never fails: problems are reported as
/// violations, including states the model refuses to evaluate.
pub fn structural_sweep(n_samples: usize, seed: u64, params: &ModelParams) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys = params.physical();
    let mut report = SweepReport { samples: n_samples, min_production: f64::INFINITY, ..Default::default() };
    let flag = |report: &mut SweepReport, check, sample, value| {
        report.violations.push(Violation { check, sample, value });
    };

    for i in 0..n_samples {
        let state = sample_state(&mut rng, params);
        let n = sample_direction(&mut rng);
        let shrink: f64 = rng.gen_range(0.0..1.0);

        match symmetry_defect(&state, &n, params) {
            Some(d) => {
                report.worst_asymmetry = report.worst_asymmetry.max(d);
                if !(d <= SYMMETRY_TOL) {
                    flag(&mut report, Check::Symmetry, i, d);
                }
            }
            None => flag(&mut report, Check::Evaluation, i, f64::NAN),
        }
        if wave_speeds(&state, &n, params).is_err() {
            flag(&mut report, Check::Spectrum, i, f64::NAN);
        }

        let Ok(ps) = unscale_map(&state, params) else {
            flag(&mut report, Check::Evaluation, i, f64::NAN);
            continue;
        };
        match cdf_variables(&ps, &phys).ok().and_then(|c| concavity_defect(&c, &phys)) {
            Some(d) if d < 0.0 => {}
            Some(d) => flag(&mut report, Check::Concavity, i, d),
            None => flag(&mut report, Check::Evaluation, i, f64::NAN),
        }

        let Ok(ratio) = pd_constraint_ratio(&ps, &phys) else {
            flag(&mut report, Check::Evaluation, i, f64::NAN);
            continue;
        };
        // PD <=> constraint, away from the boundary where round-off decides
        if (ratio - 1.0).abs() > 1e-8 {
            if let Ok(m) = dissipation_matrix(&ps, &phys) {
                let eig = m.symmetric_eigenvalues();
                let scale = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
                let pd = eig[0] > 1e-12 * scale;
                if pd != (ratio < 1.0) {
                    flag(&mut report, Check::PdConsistency, i, ratio);
                }
            } else {
                flag(&mut report, Check::Evaluation, i, f64::NAN);
            }
        }

        // production on a constraint-satisfying state: shrink sigma into the admissible cone
        let mut admissible = ps;
        if ratio.is_finite() && ratio >= 1.0 {
            admissible.sigma = ps.sigma.scale(shrink / sqrt(ratio));
        }
        if matches!(pd_constraint_ratio(&admissible, &phys), Ok(r) if r < 1.0) {
            report.constrained += 1;
            match entropy_production(&admissible, &phys) {
                Ok(h) => {
                    report.min_production = report.min_production.min(h);
                    if !(h >= -PRODUCTION_TOL) {
                        flag(&mut report, Check::Production, i, h);
                    }
                }
                Err(_) => flag(&mut report, Check::Evaluation, i, f64::NAN),
            }
        }
    }
    report
}
