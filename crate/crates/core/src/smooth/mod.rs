//! Smooth functions with exact derivative access: a symbolic expression type,
//! Taylor-jet arithmetic, and the oracle trait the rest of the crate lifts.

mod expr;
mod jet;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use expr::{BoundExpr, SmoothExpr, Var};
pub(crate) use expr::format_complex;
pub use jet::Jet;
pub(crate) use jet::{binomial, factorial, falling};

use crate::error::Result;

/// A smooth function that can report its Taylor coefficients at a point.
pub trait DerivativeOracle: fmt::Debug + Send + Sync {
    /// `f^(k)(at) / k!` for `k = 0..=order`.
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>>;

    fn value(&self, at: Complex64) -> Result<Complex64> {
        Ok(self.taylor(at, 0)?[0])
    }
}

/// Wraps a closure returning Taylor coefficients.
pub struct FnOracle<F> {
    name: String,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(Complex64, usize) -> Result<Vec<Complex64>> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnOracle {
            name: name.into(),
            f,
        }
    }
}

impl<F> fmt::Debug for FnOracle<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnOracle({})", self.name)
    }
}

impl<F> DerivativeOracle for FnOracle<F>
where
    F: Fn(Complex64, usize) -> Result<Vec<Complex64>> + Send + Sync,
{
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>> {
        (self.f)(at, order)
    }
}

/// `x ↦ f^(deriv)(x - offset)` for an inner oracle `f`.
#[derive(Clone, Debug)]
pub struct ShiftedDerivative {
    pub inner: Arc<dyn DerivativeOracle>,
    pub deriv: usize,
    pub offset: f64,
}

impl DerivativeOracle for ShiftedDerivative {
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let raw = self
            .inner
            .taylor(at - self.offset, order + self.deriv)?;
        Ok(Jet::from_coeffs(raw).differentiate(self.deriv).into_coeffs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_derivative_of_exp() {
        let exp = Arc::new(SmoothExpr::exp(SmoothExpr::t()));
        let d = ShiftedDerivative {
            inner: exp,
            deriv: 2,
            offset: 1.0,
        };
        let c = d.taylor(Complex64::new(1.0, 0.0), 2).unwrap();
        assert!((c[0].re - 1.0).abs() < 1e-15);
        assert!((c[1].re - 1.0).abs() < 1e-15);
        assert!((c[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closure_oracle() {
        let cube = FnOracle::new("x^3", |x: Complex64, order: usize| {
            let mut v = vec![x * x * x, 3.0 * x * x, 3.0 * x, Complex64::new(1.0, 0.0)];
            v.resize(order + 1, Complex64::new(0.0, 0.0));
            Ok(v)
        });
        assert_eq!(cube.value(Complex64::new(2.0, 0.0)).unwrap().re, 8.0);
    }
}
