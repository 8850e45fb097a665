use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands carry different truncation contexts")]
    ContextMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("value is not finite (valuation {0})")]
    NotFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mollifier construction failed: {reason} (condition number {condition:e})")]
    Construction { reason: String, condition: f64 },

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (estimate {estimate:e})")]
    Tolerance {
        a: f64,
        b: f64,
        tol: f64,
        estimate: f64,
    },

    #[error("support error: {0}")]
    Support(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Raised by the Laplace transform when an argument lies outside its domain.
    #[error("not in the domain of the Laplace transform: {0}")]
    DomainMembership(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid option: {0}")]
    Options(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
