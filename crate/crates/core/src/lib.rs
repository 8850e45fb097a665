//! Truncated Levi-Civita scalars, a Colombeau-type algebra of generalized
//! functions over them, and a Laplace transform that accepts infinitesimally
//! shifted deltas.
//!
//! The crate is organized bottom-up:
//!
//! * [`lc`] holds the non-Archimedean scalars `R̂`/`Ĉ` as truncated series in
//!   a fixed infinitesimal `s`.
//! * [`mollifier`] builds the bump kernels that give singular atoms their
//!   representatives.
//! * [`gf`] is the algebra of generalized functions: deltas, Heavisides,
//!   smooth functions, their products, shifts and pairings.
//! * [`laplace`] is the transform, its inverse, the IVP pipeline and an audit
//!   of the classical table.
//! * [`cli`] is the expression language and the command dispatcher behind the
//!   `lcgf` binary.

pub mod cli;
pub mod error;
pub mod gf;
pub mod laplace;
pub mod lc;
pub mod mollifier;
pub mod quad;
pub mod smooth;

pub use error::{Error, Result};
