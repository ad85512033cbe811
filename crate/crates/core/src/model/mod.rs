//! The closed 14-variable turbulence model.
//!
//! Two state representations are used. [`PhysState`] holds the unscaled
//! variables `(rho, u, sigma, k, y)` of the balance-law form; [`RescaledState`]
//! holds the Mach-rescaled primitive variables `(phi, u, sigma, k, y)` that the
//! solver evolves. `scale_map` / `unscale_map` convert between them.
//!
//! Symmetric tensors are stored as 6-vectors in the order
//! `(11, 12, 13, 22, 23, 33)`; see [`Sym6`].

mod entropy;
mod jacobian;
mod source;

pub use entropy::{
    cdf_variables, dissipation_matrix, entropy, entropy_production, pd_constraint,
    pd_constraint_ratio, specific_entropy_cdf, CdfState,
};
pub use jacobian::{
    apply_flux_jacobian, apply_with_coeffs, fast_max_wave_speed, flux_jacobian, max_wave_speed, symmetrizer,
    symmetrizer_diagonal, wave_speeds, JacobianCoeffs,
};
pub use source::source;

use crate::eos::EosParams;
use crate::error::{Error, Result};
use crate::math::{powf, sqrt};

/// Number of unknowns per cell.
pub const NVAR: usize = 14;
pub const PHI: usize = 0;
pub const U: usize = 1;
pub const SIGMA: usize = 4;
pub const K: usize = 10;
pub const Y: usize = 11;

/// Closure and scaling constants.
///
/// The constants are those of the rescaled system: `nu` is the viscosity
/// that appears next to `nu_T = l sqrt(k)` in the rescaled equations and
/// `epsilon` is the Mach-scaling parameter. [`ModelParams::physical`] gives
/// the constants of the equivalent unscaled model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub xi: f64,
    pub beta: f64,
    pub c_d: f64,
    /// Turbulence length scale.
    pub l: f64,
    pub nu: f64,
    pub epsilon: f64,
    pub eos: EosParams,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 1.0,
            xi: 1.0,
            beta: 1.0,
            c_d: 0.08,
            l: 0.1,
            nu: 0.01,
            epsilon: 1.0,
            eos: EosParams::default(),
        }
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.alpha1, "alpha1 must be > 0"),
            (self.alpha2, "alpha2 must be > 0"),
            (self.alpha3, "alpha3 must be > 0"),
            (self.xi, "xi must be > 0"),
            (self.beta, "beta must be > 0"),
            (self.c_d, "c_d must be > 0"),
            (self.l, "l must be > 0"),
            (self.nu, "nu must be > 0"),
            (self.epsilon, "epsilon must be > 0"),
        ];
        for (value, msg) in checks {
            if !positive(value) {
                return Err(Error::Config(msg));
            }
        }
        if self.epsilon > 1.0 {
            return Err(Error::Config("epsilon must be <= 1"));
        }
        self.eos.validate()
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Whether the incompressible limit reduces to Prandtl's one-equation
    /// model: `alpha2 = beta = xi^2` and `rho0 = 1`.
    pub fn is_limit_compatible(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        close(self.alpha2, self.beta)
            && close(self.beta, self.xi * self.xi)
            && close(self.eos.rho0, 1.0)
    }

    /// Constants of the unscaled model whose solutions `unscale_map`
    /// reconstructs (physical time `t = tau / epsilon`).
    pub fn physical(&self) -> Self {
        let e = self.epsilon;
        Self {
            alpha1: self.alpha1 / e,
            alpha2: self.alpha2 / (e * e),
            alpha3: self.alpha3 / e,
            xi: self.xi / e,
            beta: self.beta / (e * e),
            nu: self.nu * e,
            epsilon: 1.0,
            ..*self
        }
    }

    /// Pressure-dependent quantities at a scaled pressure fluctuation `phi`:
    /// `(rho, q)` evaluated at `p0 + epsilon phi`.
    pub fn rho_q(&self, phi: f64) -> Result<(f64, f64)> {
        let p = self.eos.p0() + self.epsilon * phi;
        if !(p > 0.0) {
            return Err(Error::State("reconstructed pressure is not positive"));
        }
        let rho = self.eos.density_from_pressure(p)?;
        let q = self.eos.q_of_p(p)?;
        Ok((rho, q))
    }
}

/// Turbulence eddy viscosity `nu_T = l sqrt(k)` and its ratio `mu_T = nu_T / nu`.
pub fn eddy_viscosity(k: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if k < 0.0 || k.is_nan() {
        return Err(Error::Domain("negative turbulent kinetic energy"));
    }
    let nu_t = params.l * sqrt(k);
    Ok((nu_t, nu_t / params.nu))
}

/// Symmetric 3x3 tensor as `(s11, s12, s13, s22, s23, s33)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sym6(pub [f64; 6]);

impl Sym6 {
    /// Multiplicity of each stored entry in the full tensor.
    pub const WEIGHTS: [f64; 6] = [1.0, 2.0, 2.0, 1.0, 2.0, 1.0];
    const INDEX: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

    pub const ZERO: Sym6 = Sym6([0.0; 6]);

    /// Double contraction `a : b`.
    pub fn contract(&self, other: &Sym6) -> f64 {
        (0..6).map(|i| Self::WEIGHTS[i] * self.0[i] * other.0[i]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.contract(self)
    }

    pub fn scale(&self, s: f64) -> Sym6 {
        Sym6(self.0.map(|x| x * s))
    }

    pub fn to_tensor(&self) -> [[f64; 3]; 3] {
        let mut t = [[0.0; 3]; 3];
        for (n, &(i, j)) in Self::INDEX.iter().enumerate() {
            t[i][j] = self.0[n];
            t[j][i] = self.0[n];
        }
        t
    }

    /// Symmetric part of a full tensor.
    pub fn from_tensor(t: &[[f64; 3]; 3]) -> Sym6 {
        Sym6(Self::INDEX.map(|(i, j)| 0.5 * (t[i][j] + t[j][i])))
    }

    /// `grad u + (grad u)^T` from `grad[i][j] = d u_i / d x_j`.
    pub fn twice_strain(grad: &[[f64; 3]; 3]) -> Sym6 {
        Sym6(Self::INDEX.map(|(i, j)| grad[i][j] + grad[j][i]))
    }

    /// Coordinates in an orthonormal basis of symmetric tensors:
    /// `sqrt(w_i) s_i`, so the Euclidean norm equals the tensor norm.
    pub fn orthonormal(&self) -> [f64; 6] {
        core::array::from_fn(|i| sqrt(Self::WEIGHTS[i]) * self.0[i])
    }
}

/// State of the rescaled system at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RescaledState {
    /// Scaled pressure fluctuation, `p = p0 + epsilon phi`.
    pub phi: f64,
    pub u: [f64; 3],
    pub sigma: Sym6,
    pub k: f64,
    pub y: [f64; 3],
}

impl RescaledState {
    pub fn to_array(&self) -> [f64; NVAR] {
        let mut a = [0.0; NVAR];
        a[PHI] = self.phi;
        a[U..U + 3].copy_from_slice(&self.u);
        a[SIGMA..SIGMA + 6].copy_from_slice(&self.sigma.0);
        a[K] = self.k;
        a[Y..Y + 3].copy_from_slice(&self.y);
        a
    }

    pub fn from_array(a: &[f64; NVAR]) -> Self {
        Self {
            phi: a[PHI],
            u: [a[U], a[U + 1], a[U + 2]],
            sigma: Sym6([a[4], a[5], a[6], a[7], a[8], a[9]]),
            k: a[K],
            y: [a[Y], a[Y + 1], a[Y + 2]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::State("non-finite state"));
        }
        if self.k < 0.0 {
            return Err(Error::State("negative turbulent kinetic energy"));
        }
        params.rho_q(self.phi).map(|_| ())
    }
}

/// State of the unscaled model at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysState {
    pub rho: f64,
    pub u: [f64; 3],
    pub sigma: Sym6,
    pub k: f64,
    pub y: [f64; 3],
}

impl PhysState {
    pub fn rest(rho: f64) -> Self {
        Self { rho, u: [0.0; 3], sigma: Sym6::ZERO, k: 0.0, y: [0.0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::State("nonpositive density"));
        }
        if self.k < 0.0 || self.k.is_nan() {
            return Err(Error::State("negative turbulent kinetic energy"));
        }
        Ok(())
    }
}

fn check_epsilon(params: &ModelParams) -> Result<f64> {
    let e = params.epsilon;
    if !positive(e) {
        return Err(Error::Domain("epsilon must be > 0"));
    }
    Ok(e)
}

/// Unscaled state to rescaled state at `params.epsilon`.
///
/// `sigma^eps = (mu_T + 1) sigma / eps^{3/2}` with `mu_T` evaluated at the
/// rescaled `k`.
pub fn scale_map(phys: &PhysState, params: &ModelParams) -> Result<RescaledState> {
    let e = check_epsilon(params)?;
    phys.validate()?;
    let p = params.eos.pressure(phys.rho)?;
    let k = phys.k / (e * e);
    let (_, mu_t) = eddy_viscosity(k, params)?;
    let sigma_factor = (mu_t + 1.0) / powf(e, 1.5);
    let sqrt_e = sqrt(e);
    Ok(RescaledState {
        phi: (p - params.eos.p0()) / e,
        u: phys.u.map(|x| x / e),
        sigma: phys.sigma.scale(sigma_factor),
        k,
        y: phys.y.map(|x| x / sqrt_e),
    })
}

/// Inverse of [`scale_map`].
pub fn unscale_map(resc: &RescaledState, params: &ModelParams) -> Result<PhysState> {
    let e = check_epsilon(params)?;
    let (rho, _) = params.rho_q(resc.phi)?;
    let (_, mu_t) = eddy_viscosity(resc.k, params)?;
    let sigma_factor = powf(e, 1.5) / (mu_t + 1.0);
    let sqrt_e = sqrt(e);
    Ok(PhysState {
        rho,
        u: resc.u.map(|x| x * e),
        sigma: resc.sigma.scale(sigma_factor),
        k: resc.k * e * e,
        y: resc.y.map(|x| x * sqrt_e),
    })
}
