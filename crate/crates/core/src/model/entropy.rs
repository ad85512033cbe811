//! Entropy, dissipation matrix and entropy production of the unscaled model.
//!
//! These functions take the constants in `params` at face value, i.e. as the
//! constants of the unscaled model. For a solver state use
//! `unscale_map(u, p)` together with `p.physical()`.

use super::{eddy_viscosity, ModelParams, PhysState, Sym6};
use crate::error::Result;
use crate::linalg::SquareMatrix10;
use crate::math::{dot3, sqrt};

/// `M` in the orthonormal tensor basis, acting on `((mu_T+1) sigma, k, eta_y)`.
///
/// The `sigma` block uses coordinates `sqrt(w_i) sigma_i` so that the
/// Euclidean inner product is the tensor contraction and positive
/// definiteness of the matrix is exactly the condition of [`pd_constraint`].
///
/// The `sigma`-block diagonal is
/// `rho / (nu (mu_T+1)) * (1 + 2 beta nu_T k / (nu (mu_T+1)))`; this is the
/// value for which `M theta` reproduces the closure fluxes (first slot
/// `rho sigma / nu`) given the off-diagonal coupling
/// `-2 beta rho nu_T sigma / (nu^2 (mu_T+1))`.
pub fn dissipation_matrix(state: &PhysState, params: &ModelParams) -> Result<SquareMatrix10> {
    state.validate()?;
    let (nu_t, mu_t) = eddy_viscosity(state.k, params)?;
    let (rho, nu, beta) = (state.rho, params.nu, params.beta);
    let top = rho / (nu * (mu_t + 1.0)) * (1.0 + 2.0 * beta * nu_t * state.k / (nu + nu_t));
    let coupling = -2.0 * beta * rho * nu_t / (nu * nu * (mu_t + 1.0));
    let center = params.c_d * beta * rho * nu_t / (params.l * params.l);
    let bottom = rho / (nu + nu_t);
    let s = state.sigma.orthonormal();

    let mut m = SquareMatrix10::zeros();
    for i in 0..6 {
        m[(i, i)] = top;
        m[(i, 6)] = coupling * s[i];
        m[(6, i)] = coupling * s[i];
    }
    m[(6, 6)] = center;
    for i in 7..10 {
        m[(i, i)] = bottom;
    }
    Ok(m)
}

/// Ratio `LHS / RHS` of the positive-definiteness condition of
/// [`dissipation_matrix`]:
/// `4 beta nu_T l^2 |sigma|^2 / (nu^2 (nu_T + nu)) < C_D (1 + 2 beta nu_T k / (nu_T + nu))`.
///
/// Infinite when `k = 0`: `M` is then only semidefinite.
pub fn pd_constraint_ratio(state: &PhysState, params: &ModelParams) -> Result<f64> {
    state.validate()?;
    let (nu_t, _) = eddy_viscosity(state.k, params)?;
    let nu = params.nu;
    let lhs = 4.0 * params.beta * nu_t * params.l * params.l / (nu * nu * (nu_t + nu))
        * state.sigma.norm_sq();
    let rhs = params.c_d * (1.0 + 2.0 * params.beta * nu_t * state.k / (nu_t + nu));
    if nu_t == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(lhs / rhs)
}

pub fn pd_constraint(state: &PhysState, params: &ModelParams) -> Result<bool> {
    Ok(pd_constraint_ratio(state, params)? < 1.0)
}

/// Variables in which the entropy is concave: specific volume, velocity,
/// conformation-like tensor `C`, scalar `w` and flux `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfState {
    pub v: f64,
    pub u: [f64; 3],
    pub c: Sym6,
    pub w: f64,
    pub y: [f64; 3],
}

/// `C = -alpha1 (mu_T + 1) sigma`, `w = -alpha2 k`.
pub fn cdf_variables(state: &PhysState, params: &ModelParams) -> Result<CdfState> {
    state.validate()?;
    let (_, mu_t) = eddy_viscosity(state.k, params)?;
    Ok(CdfState {
        v: 1.0 / state.rho,
        u: state.u,
        c: state.sigma.scale(-params.alpha1 * (mu_t + 1.0)),
        w: -params.alpha2 * state.k,
        y: state.y,
    })
}

/// Specific entropy `s(v, u, C, w, y)`.
pub fn specific_entropy_cdf(cdf: &CdfState, params: &ModelParams) -> Result<f64> {
    Ok(params.eos.s_eq(cdf.v)?
        - 0.5 * dot3(&cdf.u, &cdf.u)
        - cdf.c.norm_sq() / (2.0 * params.alpha1)
        - cdf.w * cdf.w / (2.0 * params.alpha2)
        - dot3(&cdf.y, &cdf.y) / (2.0 * params.alpha3))
}

/// Entropy density `eta = rho s`.
pub fn entropy(state: &PhysState, params: &ModelParams) -> Result<f64> {
    let cdf = cdf_variables(state, params)?;
    Ok(state.rho * specific_entropy_cdf(&cdf, params)?)
}

/// Entropy production `H = theta : (M theta)`, with `M theta` assembled
/// componentwise rather than through [`dissipation_matrix`].
pub fn entropy_production(state: &PhysState, params: &ModelParams) -> Result<f64> {
    state.validate()?;
    let (nu_t, mu_t) = eddy_viscosity(state.k, params)?;
    let (rho, nu) = (state.rho, params.nu);
    let ss = state.sigma.norm_sq();
    // theta = ((mu_T + 1) sigma, k, -y / alpha3)
    let sigma_part = (mu_t + 1.0) * rho * ss / nu;
    let k_part = state.k
        * (-2.0 * params.beta * rho * nu_t / (nu * nu) * ss
            + params.beta * params.c_d * rho / params.l * state.k * sqrt(state.k));
    let y_sq = dot3(&state.y, &state.y) / (params.alpha3 * params.alpha3);
    let y_part = rho * y_sq / (nu + nu_t);
    Ok(sigma_part + k_part + y_part)
}
