//! The scalar fields `R̂` and `Ĉ`, realized as truncated Levi-Civita series in
//! a fixed positive infinitesimal `s`.
//!
//! Values carry a [`TruncationContext`]; anything beyond `q_max` is dropped,
//! so every identity holds up to a residual of valuation greater than `q_max`.

mod complex;
mod context;
mod exponent;
mod lift;
mod real;
mod valuation;

pub use complex::{LcComplex, TermRecord};
pub use context::{TruncationContext, DEFAULT_COEFF_FLOOR, DEFAULT_Q_MAX};
pub use exponent::Exponent;
pub use lift::{eval_series_lc, eval_taylor, exp_lc, lift_smooth, lift_smooth_real, taylor_depth};
pub use real::LcReal;
pub use valuation::{Magnitude, Valuation};

