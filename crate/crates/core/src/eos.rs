//! Isothermal equation of state `p = c^2 rho`.
//!
//! With this law the equilibrium entropy `s_eq(v) = c^2 ln v` satisfies
//! `ds_eq/dv = p(1/v)` and the compressibility coefficient is `q(p) = 1/p`.

use crate::error::{Error, Result};
use crate::math::ln;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    /// Isothermal sound speed.
    pub c: f64,
    /// Reference density.
    pub rho0: f64,
}

impl Default for EosParams {
    fn default() -> Self {
        Self { c: 1.0, rho0: 1.0 }
    }
}

impl EosParams {
    pub fn new(c: f64, rho0: f64) -> Result<Self> {
        let eos = Self { c, rho0 };
        eos.validate()?;
        Ok(eos)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config("c must be > 0"));
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::Config("rho0 must be > 0"));
        }
        Ok(())
    }

    /// Reference pressure `p0 = c^2 rho0`.
    #[inline]
    pub fn p0(&self) -> f64 {
        self.c * self.c * self.rho0
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain("nonpositive density"));
        }
        Ok(self.c * self.c * rho)
    }

    pub fn density_from_pressure(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain("nonpositive pressure"));
        }
        Ok(p / (self.c * self.c))
    }

    /// `q(p) = 1 / (rho(p) p'(rho(p)))`, which is `1/p` for this law.
    pub fn q_of_p(&self, p: f64) -> Result<f64> {
        let rho = self.density_from_pressure(p)?;
        Ok(1.0 / (rho * self.c * self.c))
    }

    /// Equilibrium specific entropy as a function of specific volume.
    pub fn s_eq(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain("nonpositive specific volume"));
        }
        Ok(self.c * self.c * ln(v))
    }

    /// `ds_eq/dv`.
    pub fn s_eq_dv(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain("nonpositive specific volume"));
        }
        Ok(self.c * self.c / v)
    }
}
