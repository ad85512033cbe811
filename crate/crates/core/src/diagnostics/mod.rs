//! Norms, structural checks, residuals and convergence fits.

mod fit;
mod norms;
mod sweep;
mod theorem;
mod totals;

pub use fit::fit_order;
pub use norms::{central_difference, discrete_norm};
pub use sweep::{structural_sweep, Check, SweepReport, Violation, PRODUCTION_TOL, SYMMETRY_TOL};
pub use theorem::{
    convergence_report, maxwell_residual, run_sweep_case, theorem_error, ConvergenceReport, MaxwellResidual,
    SweepCase, TheoremError, ENTROPY_REL_TOL, MIN_CORE_SLOPE,
};
pub use totals::{field_totals, FieldTotals};
