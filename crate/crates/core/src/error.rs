use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a pointwise function.
    Domain(&'static str),
    /// A state violates the admissible set (nonpositive pressure, negative k, ...).
    State(&'static str),
    /// Model or run parameters violate their invariants.
    Config(&'static str),
    /// A floating point computation produced something unusable.
    Numerical(&'static str),
    /// The requested step exceeds the stability limit.
    StepRejected { dt: f64, dt_max: f64 },
    /// A run stopped; `cause` says why (blow-up, rejected step, ...).
    Aborted { step: usize, cause: Box<Error> },
    /// Inputs with incompatible shapes or times.
    Usage(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::State(msg) => write!(f, "invalid state: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::StepRejected { dt, dt_max } => {
                write!(f, "step rejected: dt = {dt:e} exceeds stability limit {dt_max:e}")
            }
            Error::Aborted { step, cause } => write!(f, "run aborted at step {step}: {cause}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
        }
    }
}

impl Error {
    pub fn aborted(step: usize, cause: Error) -> Self {
        Error::Aborted { step, cause: Box::new(cause) }
    }
}

impl core::error::Error for Error {}
