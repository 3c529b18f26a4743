use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("adaptive quadrature on [{a}, {b}] did not converge; worst panel at t = {worst_t}")]
    QuadratureDiverged { a: f64, b: f64, worst_t: f64 },

    #[error("non-finite integrand value at t = {t}")]
    NonFiniteIntegrand { t: f64 },

    #[error("leading coefficient vanishes at t = {t} (|a_n| = {value:e})")]
    LeadingCoefficientVanishes { t: f64, value: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("ODE integration exceeded {max_steps} steps before t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("expected a system of order {expected}, got order {found}")]
    OrderMismatch { expected: String, found: usize },

    #[error("scalar (order 0) system not accepted here: {0}")]
    ScalarSystem(String),

    #[error("t = {t} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },

    #[error("system file, line {line}: {message}")]
    SystemFile { line: usize, message: String },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
