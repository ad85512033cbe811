use super::{eddy_viscosity, ModelParams, RescaledState, K, NVAR, SIGMA, Y};
use crate::error::Result;
use crate::math::{powf, sqrt};

/// Relaxation source `Q(U)` of the rescaled system.
///
/// Zero in the `phi` and `u` slots; `sigma` and `y` relax on the time scales
/// `eps alpha1 (nu_T + nu)` and `eps alpha3 (nu_T + nu)`; `k` gains
/// production from `sigma : sigma` and loses `beta C_D k^{3/2} / (alpha2 l)`.
pub fn source(state: &RescaledState, params: &ModelParams) -> Result<[f64; NVAR]> {
    let (nu_t, _) = eddy_viscosity(state.k, params)?;
    let e = params.epsilon;
    let visc = nu_t + params.nu;
    let mut q = [0.0; NVAR];
    let sigma_rate = 1.0 / (e * params.alpha1 * visc);
    for i in 0..6 {
        q[SIGMA + i] = -sigma_rate * state.sigma.0[i];
    }
    let production =
        2.0 * params.beta / (e * params.alpha2) * nu_t / (visc * visc) * state.sigma.norm_sq();
    let dissipation = params.beta * params.c_d / (params.alpha2 * params.l) * state.k * sqrt(state.k);
    q[K] = production - dissipation;
    let y_rate = 1.0 / (e * params.alpha3 * visc);
    for i in 0..3 {
        q[Y + i] = -y_rate * state.y[i];
    }
    debug_assert!(powf(state.k, 1.5).is_finite());
    Ok(q)
}
