//! Flux Jacobian `A(U, zeta) = sum_j A_j(U) zeta_j`, its symmetrizer, and wave speeds.

use super::{ModelParams, RescaledState, Sym6, K, NVAR, PHI, SIGMA, U, Y};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix14;
use crate::math::{dot3, norm3, sqrt};

/// State-dependent coupling coefficients of the flux Jacobian.
///
/// All of them depend on the state only through `phi` (via `rho`, `q`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCoeffs {
    /// phi row, u columns: `1 / (eps q)`.
    pub phi_u: f64,
    /// u rows, phi column: `1 / (eps rho)`.
    pub u_phi: f64,
    /// u rows, sigma columns: `1 / (sqrt(eps) rho)`.
    pub u_sigma: f64,
    /// u rows, k column: `2 / (3 rho)`.
    pub u_k: f64,
    /// sigma rows, u columns: `1 / (sqrt(eps) alpha1 rho)`.
    pub sigma_u: f64,
    /// k row, u columns: `2 / (3 alpha2 rho)`.
    pub k_u: f64,
    /// k row, y columns: `xi / (sqrt(eps) alpha2 alpha3 rho)`.
    pub k_y: f64,
    /// y rows, k column: `xi / (sqrt(eps) rho)`.
    pub y_k: f64,
}

impl JacobianCoeffs {
    pub fn new(phi: f64, params: &ModelParams) -> Result<Self> {
        let (rho, q) = params.rho_q(phi)?;
        let e = params.epsilon;
        let se = sqrt(e);
        Ok(Self {
            phi_u: 1.0 / (e * q),
            u_phi: 1.0 / (e * rho),
            u_sigma: 1.0 / (se * rho),
            u_k: 2.0 / (3.0 * rho),
            sigma_u: 1.0 / (se * params.alpha1 * rho),
            k_u: 2.0 / (3.0 * params.alpha2 * rho),
            k_y: params.xi / (se * params.alpha2 * params.alpha3 * rho),
            y_k: params.xi / (se * rho),
        })
    }

    /// Largest eigenvalue of the direction-dependent part (everything but
    /// `(u . n) I`) for a unit direction.
    ///
    /// The model is isotropic, so the spectrum only depends on `|n|`. Along
    /// `e1` the longitudinal block `(phi, u1, sigma11, k, y1)` is a weighted
    /// tree whose characteristic polynomial is
    /// `lambda (lambda^4 - S lambda^2 + P)`; the transverse pairs
    /// `(u2, sigma12)`, `(u3, sigma13)` contribute `lambda^2 = u_sigma sigma_u / 2`.
    pub fn acoustic_radius(&self) -> f64 {
        let ab = self.phi_u * self.u_phi;
        let ce = self.u_sigma * self.sigma_u;
        let df = self.u_k * self.k_u;
        let gh = self.k_y * self.y_k;
        let s = ab + ce + df + gh;
        let p = gh * (ab + ce);
        let disc = (s * s - 4.0 * p).max(0.0);
        let longitudinal = 0.5 * (s + sqrt(disc));
        let transverse = 0.5 * ce;
        sqrt(longitudinal.max(transverse))
    }
}

/// `C(zeta) sigma = sigma . zeta` (tensor times vector).
#[inline]
fn c_times(zeta: &[f64; 3], s: &[f64]) -> [f64; 3] {
    [
        zeta[0] * s[0] + zeta[1] * s[1] + zeta[2] * s[2],
        zeta[0] * s[1] + zeta[1] * s[3] + zeta[2] * s[4],
        zeta[0] * s[2] + zeta[1] * s[4] + zeta[2] * s[5],
    ]
}

/// `D(zeta) u = sym(u (x) zeta)` in 6-vector order.
#[inline]
fn d_times(zeta: &[f64; 3], u: &[f64]) -> [f64; 6] {
    [
        zeta[0] * u[0],
        0.5 * (zeta[1] * u[0] + zeta[0] * u[1]),
        0.5 * (zeta[2] * u[0] + zeta[0] * u[2]),
        zeta[1] * u[1],
        0.5 * (zeta[2] * u[1] + zeta[1] * u[2]),
        zeta[2] * u[2],
    ]
}

/// Matrix-free product `A(U, zeta) v` using precomputed coefficients.
#[inline]
pub fn apply_with_coeffs(
    coeffs: &JacobianCoeffs,
    velocity: &[f64; 3],
    zeta: &[f64; 3],
    v: &[f64; NVAR],
) -> [f64; NVAR] {
    let adv = dot3(velocity, zeta);
    let mut out = v.map(|x| adv * x);
    let vu = &v[U..U + 3];
    let vy = &v[Y..Y + 3];
    let zu = zeta[0] * vu[0] + zeta[1] * vu[1] + zeta[2] * vu[2];
    let zy = zeta[0] * vy[0] + zeta[1] * vy[1] + zeta[2] * vy[2];

    out[PHI] += coeffs.phi_u * zu;
    let cs = c_times(zeta, &v[SIGMA..SIGMA + 6]);
    for i in 0..3 {
        out[U + i] += coeffs.u_phi * zeta[i] * v[PHI] + coeffs.u_sigma * cs[i] + coeffs.u_k * zeta[i] * v[K];
        out[Y + i] += coeffs.y_k * zeta[i] * v[K];
    }
    let du = d_times(zeta, vu);
    for i in 0..6 {
        out[SIGMA + i] += coeffs.sigma_u * du[i];
    }
    out[K] += coeffs.k_u * zu + coeffs.k_y * zy;
    out
}

pub fn apply_flux_jacobian(
    state: &RescaledState,
    zeta: &[f64; 3],
    v: &[f64; NVAR],
    params: &ModelParams,
) -> Result<[f64; NVAR]> {
    let coeffs = JacobianCoeffs::new(state.phi, params)?;
    Ok(apply_with_coeffs(&coeffs, &state.u, zeta, v))
}

/// Dense flux Jacobian in the row/column order `(phi, u, sigma, k, y)`.
pub fn flux_jacobian(state: &RescaledState, zeta: &[f64; 3], params: &ModelParams) -> Result<SquareMatrix14> {
    let c = JacobianCoeffs::new(state.phi, params)?;
    let [z1, z2, z3] = *zeta;
    let c_block = [
        [z1, z2, z3, 0.0, 0.0, 0.0],
        [0.0, z1, 0.0, z2, z3, 0.0],
        [0.0, 0.0, z1, 0.0, z2, z3],
    ];
    let d_block = [
        [z1, 0.0, 0.0],
        [0.5 * z2, 0.5 * z1, 0.0],
        [0.5 * z3, 0.0, 0.5 * z1],
        [0.0, z2, 0.0],
        [0.0, 0.5 * z3, 0.5 * z2],
        [0.0, 0.0, z3],
    ];

    let mut a = SquareMatrix14::identity().scale(dot3(&state.u, zeta));
    for i in 0..3 {
        a[(PHI, U + i)] += c.phi_u * zeta[i];
        a[(U + i, PHI)] += c.u_phi * zeta[i];
        for j in 0..6 {
            a[(U + i, SIGMA + j)] += c.u_sigma * c_block[i][j];
        }
        a[(U + i, K)] += c.u_k * zeta[i];
        a[(K, U + i)] += c.k_u * zeta[i];
        a[(K, Y + i)] += c.k_y * zeta[i];
        a[(Y + i, K)] += c.y_k * zeta[i];
    }
    for i in 0..6 {
        for j in 0..3 {
            a[(SIGMA + i, U + j)] += c.sigma_u * d_block[i][j];
        }
    }
    Ok(a)
}

/// Diagonal of `A0 = diag{q/rho, I3, alpha1 diag(1,2,2,1,2,1), alpha2, I3/alpha3}`.
pub fn symmetrizer_diagonal(state: &RescaledState, params: &ModelParams) -> Result<[f64; NVAR]> {
    let (rho, q) = params.rho_q(state.phi)?;
    let mut d = [0.0; NVAR];
    d[PHI] = q / rho;
    d[U..U + 3].fill(1.0);
    for i in 0..6 {
        d[SIGMA + i] = params.alpha1 * Sym6::WEIGHTS[i];
    }
    d[K] = params.alpha2;
    d[Y..Y + 3].fill(1.0 / params.alpha3);
    Ok(d)
}

pub fn symmetrizer(state: &RescaledState, params: &ModelParams) -> Result<SquareMatrix14> {
    Ok(SquareMatrix14::from_diagonal(&symmetrizer_diagonal(state, params)?))
}

/// All 14 characteristic speeds of `A(U, n)`, ascending.
///
/// Computed from the symmetrized matrix `A0^{1/2} A A0^{-1/2}`. By
/// Bendixson's theorem the imaginary parts of the spectrum are bounded by the
/// norm of its skew part; a bound above `1e-10` is reported as an error.
pub fn wave_speeds(state: &RescaledState, n: &[f64; 3], params: &ModelParams) -> Result<[f64; NVAR]> {
    let a = flux_jacobian(state, n, params)?;
    let d = symmetrizer_diagonal(state, params)?;
    if d.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Numerical("symmetrizer is not positive definite"));
    }
    let sd = d.map(sqrt);
    let mut s = SquareMatrix14::zeros();
    for i in 0..NVAR {
        for j in 0..NVAR {
            s[(i, j)] = sd[i] * a[(i, j)] / sd[j];
        }
    }
    if !s.is_finite() {
        return Err(Error::Numerical("non-finite flux Jacobian"));
    }
    let skew = 0.5 * s.asymmetry_inf();
    let tol = 1e-10_f64.max(1e-14 * s.norm_frobenius());
    if skew > tol {
        return Err(Error::Numerical("flux Jacobian has a complex spectrum"));
    }
    Ok(s.symmetric_eigenvalues())
}

/// Spectral radius of `A(U, n)` via the symmetrized eigen-solve.
pub fn max_wave_speed(state: &RescaledState, n: &[f64; 3], params: &ModelParams) -> Result<f64> {
    let speeds = wave_speeds(state, n, params)?;
    Ok(speeds.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
}

/// Closed-form spectral radius `|u . n| + |n| * acoustic_radius`.
pub fn fast_max_wave_speed(state: &RescaledState, n: &[f64; 3], params: &ModelParams) -> Result<f64> {
    let c = JacobianCoeffs::new(state.phi, params)?;
    let lam = dot3(&state.u, n).abs() + norm3(n) * c.acoustic_radius();
    if !lam.is_finite() {
        return Err(Error::Numerical("non-finite wave speed"));
    }
    Ok(lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RescaledState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> RescaledState {
        RescaledState {
            phi: rng.gen_range(-0.5..0.5),
            u: core::array::from_fn(|_| rng.gen_range(-0.6..0.6)),
            sigma: Sym6(core::array::from_fn(|_| rng.gen_range(-0.3..0.3))),
            k: rng.gen_range(0.0..2.0),
            y: core::array::from_fn(|_| rng.gen_range(-0.5..0.5)),
        }
    }

    fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
        ModelParams {
            alpha1: rng.gen_range(0.2..3.0),
            alpha2: rng.gen_range(0.2..3.0),
            alpha3: rng.gen_range(0.2..3.0),
            xi: rng.gen_range(0.2..3.0),
            epsilon: rng.gen_range(0.05..1.0),
            ..Default::default()
        }
    }

    #[test]
    fn zero_direction_gives_zero_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&mut rng);
        let a = flux_jacobian(&s, &[0.0; 3], &ModelParams::default()).unwrap();
        assert_eq!(a, SquareMatrix14::zeros());
    }

    #[test]
    fn rest_state_axis_entries() {
        let s = RescaledState { k: 0.7, ..Default::default() };
        let p = ModelParams::default();
        let a = flux_jacobian(&s, &[1.0, 0.0, 0.0], &p).unwrap();
        assert_eq!(a[(PHI, U)], 1.0);
        assert_eq!(a[(U, PHI)], 1.0);
        for i in 0..NVAR {
            assert_eq!(a[(i, i)], 0.0);
        }
        // Independent index-by-index construction of the same sparse pattern.
        let mut b = SquareMatrix14::zeros();
        b[(0, 1)] = 1.0;
        b[(1, 0)] = 1.0;
        b[(1, 4)] = 1.0; // u1 <- sigma11
        b[(2, 5)] = 1.0; // u2 <- sigma12
        b[(3, 6)] = 1.0; // u3 <- sigma13
        b[(1, 10)] = 2.0 / 3.0;
        b[(4, 1)] = 1.0; // sigma11 <- u1
        b[(5, 2)] = 0.5; // sigma12 <- u2
        b[(6, 3)] = 0.5; // sigma13 <- u3
        b[(10, 1)] = 2.0 / 3.0;
        b[(10, 11)] = 1.0;
        b[(11, 10)] = 1.0;
        assert_eq!(a, b);
    }

    #[test]
    fn jacobian_is_linear_in_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let p = random_params(&mut rng);
            let z: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let full = flux_jacobian(&s, &z, &p).unwrap();
            let mut sum = SquareMatrix14::zeros();
            for (j, zj) in z.iter().enumerate() {
                let mut e = [0.0; 3];
                e[j] = 1.0;
                sum = sum.add(&flux_jacobian(&s, &e, &p).unwrap().scale(*zj));
            }
            for i in 0..NVAR {
                for j in 0..NVAR {
                    assert!((full[(i, j)] - sum[(i, j)]).abs() <= 1e-12 * full.norm_inf());
                }
            }
        }
    }

    #[test]
    fn matrix_free_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let p = random_params(&mut rng);
            let z: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let v: [f64; NVAR] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let dense = flux_jacobian(&s, &z, &p).unwrap().mul_vec(&v);
            let free = apply_flux_jacobian(&s, &z, &v, &p).unwrap();
            for (a, b) in dense.iter().zip(free.iter()) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn symmetrizer_reference_values() {
        let p = ModelParams::default();
        let d = symmetrizer_diagonal(&RescaledState::default(), &p).unwrap();
        assert_eq!(d, [1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn symmetrizer_makes_jacobian_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let p = random_params(&mut rng);
            let z: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let a0 = symmetrizer(&s, &p).unwrap();
            assert!(a0.diagonal().iter().all(|&x| x > 0.0));
            let prod = a0 * flux_jacobian(&s, &z, &p).unwrap();
            assert!(prod.asymmetry_inf() <= 1e-12 * prod.norm_inf());
        }
    }

    #[test]
    fn closed_form_speed_matches_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..300 {
            let s = random_state(&mut rng);
            let p = random_params(&mut rng);
            let raw: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let nrm = norm3(&raw);
            let n = raw.map(|x| x / nrm);
            let slow = max_wave_speed(&s, &n, &p).unwrap();
            let fast = fast_max_wave_speed(&s, &n, &p).unwrap();
            assert!((slow - fast).abs() <= 1e-10 * slow, "{slow} vs {fast}");
            assert!(slow >= dot3(&s.u, &n).abs());
            let minus = max_wave_speed(&s, &n.map(|x| -x), &p).unwrap();
            assert!((slow - minus).abs() <= 1e-10 * slow);
        }
    }

    #[test]
    fn wave_speed_grows_like_inverse_epsilon() {
        let s = RescaledState::default();
        let e1 = [1.0, 0.0, 0.0];
        let big = max_wave_speed(&s, &e1, &ModelParams::default().with_epsilon(0.01)).unwrap();
        let small = max_wave_speed(&s, &e1, &ModelParams::default()).unwrap();
        let ratio = big / small;
        assert!((50.0..=200.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn nonpositive_pressure_is_a_state_error() {
        let s = RescaledState { phi: -2.0, ..Default::default() };
        assert!(matches!(
            flux_jacobian(&s, &[1.0, 0.0, 0.0], &ModelParams::default()),
            Err(Error::State(_))
        ));
    }
}
