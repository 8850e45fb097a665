use num_complex::Complex64;

use super::{LcComplex, LcReal, Valuation};
use crate::error::{Error, Result};
use crate::smooth::DerivativeOracle;

/// Highest Taylor order whose term `h^k` can still reach the truncation
/// window of `h`'s context. `h` must be infinitesimal.
pub fn taylor_depth(h: &LcComplex) -> usize {
    match h.valuation() {
        Valuation::Infinite => 0,
        Valuation::Finite(v) => {
            assert!(v.is_positive(), "taylor_depth needs an infinitesimal increment");
            v.max_multiple_within(&h.ctx().q_max).unwrap_or(0)
        }
    }
}

/// `Σ_k c_k h^k` (Horner), with standard coefficients `c_k`.
pub fn eval_taylor(coeffs: &[Complex64], h: &LcComplex) -> LcComplex {
    let ctx = h.ctx();
    let mut acc = LcComplex::zero(ctx);
    for c in coeffs.iter().rev() {
        acc = &(&acc * h) + &LcComplex::constant(*c, ctx);
    }
    acc
}

/// Extends a smooth `f` to the monad of its domain:
/// `f(x0 + h) = Σ f^(k)(x0) h^k / k!` with `x0 = st(x)`.
///
/// The sum is finite because `v(h) > 0` and exponents are truncated.
pub fn lift_smooth(f: &dyn DerivativeOracle, x: &LcComplex) -> Result<LcComplex> {
    let x0 = x.standard_part()?;
    let h = x.infinitesimal_part()?;
    let depth = taylor_depth(&h);
    let coeffs = f.taylor(x0, depth)?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("derivatives not finite at {x0}")));
    }
    Ok(eval_taylor(&coeffs, &h))
}

pub fn lift_smooth_real(f: &dyn DerivativeOracle, x: &LcReal) -> Result<LcComplex> {
    lift_smooth(f, &LcComplex::from_real(x.clone()))
}

/// `Σ_k d_k h^k` where the `d_k` are already lifted (nonstandard) coefficients.
pub fn eval_series_lc(coeffs: &[LcComplex], h: &LcComplex) -> LcComplex {
    let ctx = h.ctx();
    let mut acc = LcComplex::zero(ctx);
    for c in coeffs.iter().rev() {
        acc = &(&acc * h) + c;
    }
    acc
}

/// `e^{x}` for a finite argument.
pub fn exp_lc(x: &LcComplex) -> Result<LcComplex> {
    lift_smooth(&crate::smooth::SmoothExpr::exp(crate::smooth::SmoothExpr::t()), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lc::{Exponent, TruncationContext};
    use crate::smooth::SmoothExpr;

    fn ctx() -> TruncationContext {
        TruncationContext::default()
    }

    #[test]
    fn exp_at_scale() {
        let s = LcComplex::from_real(LcReal::scale(&ctx()));
        let e = lift_smooth(&SmoothExpr::exp(SmoothExpr::t()), &s).unwrap();
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            let c = e.coefficient(&Exponent::integer(k)).re;
            assert!((c - 1.0 / fact).abs() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn sin_at_zero_and_real_points() {
        let zero = LcComplex::zero(&ctx());
        assert!(lift_smooth(&SmoothExpr::sin(SmoothExpr::t()), &zero)
            .unwrap()
            .is_zero());
        let x = LcComplex::constant(Complex64::new(0.4, 0.0), &ctx());
        let v = lift_smooth(&SmoothExpr::sin(SmoothExpr::t()), &x).unwrap();
        assert_eq!(v.coefficient(&Exponent::zero()).re, 0.4f64.sin());
        assert_eq!(v.exponents().len(), 1);
    }

    #[test]
    fn errors() {
        let inf = LcComplex::from_real(LcReal::scale(&ctx()).invert().unwrap());
        assert!(matches!(
            lift_smooth(&SmoothExpr::sin(SmoothExpr::t()), &inf),
            Err(Error::NotFinite(_))
        ));
        let neg = LcComplex::constant(Complex64::new(-1.0, 0.0), &ctx());
        assert!(matches!(
            lift_smooth(&SmoothExpr::ln(SmoothExpr::t()), &neg),
            Err(Error::Domain(_))
        ));
    }
}
