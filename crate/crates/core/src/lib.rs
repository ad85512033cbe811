//! Hyperbolic relaxation turbulence model for isothermal compressible flow.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//! the equation of state, the closed 14-variable model with its structural
//! operators, a finite-volume / pseudo-spectral solver for the Mach-rescaled
//! system, a spectral reference solver for the incompressible limit, and the
//! diagnostics used to verify all of them. File formats and the command line
//! live in the `hyperturb` crate.

#![no_std]

extern crate alloc;

pub mod diagnostics;
pub mod eos;
pub mod error;
pub mod grid;
pub mod incompressible;
pub mod linalg;
pub mod math;
pub mod model;
pub mod solver;
pub mod spectral;

pub use eos::EosParams;
pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use model::{ModelParams, PhysState, RescaledState, Sym6};
