use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Polynomial degree above what the angular reduction supports.
    #[error("polynomial degree {degree} exceeds supported maximum {max}")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("empty polynomial coefficient list")]
    EmptyPolynomial,

    /// A (Y1 Y2) power survived phi-averaging with odd exponent. Cannot happen
    /// for input produced by `expand_u_polynomial`.
    #[error("internal: odd Y exponent {0} survived phi-averaging")]
    OddYExponent(u32),

    #[error("cannot add pi-rationals with pi powers {0} and {1}")]
    PiPowerMismatch(i32, i32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand returned NaN at t = {0}")]
    NotANumber(f64),

    /// Quadrature stopped before reaching the requested tolerance.
    #[error("accuracy not reached: error estimate {estimate:e} > requested {requested:e}")]
    Accuracy { estimate: f64, requested: f64 },

    #[error("parity check failed: discarded component {discarded:e} exceeds {tolerance:e}")]
    Parity { discarded: f64, tolerance: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("malformed input: {0}")]
    Parse(String),
}
