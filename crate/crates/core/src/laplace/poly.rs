use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lc::{LcComplex, TruncationContext};
use crate::smooth::format_complex;

/// A polynomial in `z` with `Ĉ` coefficients, lowest degree first. Trailing
/// zero coefficients are always trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<LcComplex>,
    ctx: TruncationContext,
}

impl Poly {
    pub fn new(coeffs: Vec<LcComplex>, ctx: &TruncationContext) -> Poly {
        let mut p = Poly {
            coeffs: coeffs.into_iter().map(|c| c.with_context(ctx)).collect(),
            ctx: ctx.clone(),
        };
        p.trim();
        p
    }

    pub fn from_complex(coeffs: &[Complex64], ctx: &TruncationContext) -> Poly {
        Poly::new(coeffs.iter().map(|c| LcComplex::constant(*c, ctx)).collect(), ctx)
    }

    pub fn from_real(coeffs: &[f64], ctx: &TruncationContext) -> Poly {
        Poly::new(
            coeffs
                .iter()
                .map(|c| LcComplex::constant(Complex64::new(*c, 0.0), ctx))
                .collect(),
            ctx,
        )
    }

    pub fn zero(ctx: &TruncationContext) -> Poly {
        Poly::new(Vec::new(), ctx)
    }

    pub fn constant(c: LcComplex) -> Poly {
        let ctx = c.ctx().clone();
        Poly::new(vec![c], &ctx)
    }

    pub fn one(ctx: &TruncationContext) -> Poly {
        Poly::constant(LcComplex::one(ctx))
    }

    /// `c z^k`.
    pub fn monomial(k: usize, c: LcComplex) -> Poly {
        let ctx = c.ctx().clone();
        let mut coeffs = vec![LcComplex::zero(&ctx); k];
        coeffs.push(c);
        Poly::new(coeffs, &ctx)
    }

    /// `z - root`.
    pub fn linear_factor(root: Complex64, ctx: &TruncationContext) -> Poly {
        Poly::from_complex(&[-root, Complex64::new(1.0, 0.0)], ctx)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(LcComplex::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &TruncationContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[LcComplex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> LcComplex {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| LcComplex::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_standard(&self) -> bool {
        self.coeffs.iter().all(|c| c.exponents().iter().all(|e| e.is_zero()))
    }

    /// Standard parts of the coefficients.
    pub fn standard(&self) -> Result<Vec<Complex64>> {
        self.coeffs.iter().map(LcComplex::standard_part).collect()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect(), &self.ctx)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&LcComplex::constant(Complex64::new(-1.0, 0.0), &self.ctx)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let mut out = vec![LcComplex::zero(&self.ctx); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out, &self.ctx)
    }

    pub fn scale(&self, c: &LcComplex) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect(), &self.ctx)
    }

    pub fn pow(&self, n: usize) -> Poly {
        (0..n).fold(Poly::one(&self.ctx), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, z: &LcComplex) -> LcComplex {
        let z = z.with_context(&self.ctx);
        self.coeffs
            .iter()
            .rev()
            .fold(LcComplex::zero(&self.ctx), |acc, c| &(&acc * &z) + c)
    }

    /// Taylor coefficients at a standard point `z0`: `p(z0 + w) = Σ c_k w^k`.
    pub fn taylor_at(&self, z0: Complex64) -> Vec<LcComplex> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        let z0 = LcComplex::constant(z0, &self.ctx);
        let mut out = Vec::with_capacity(n);
        // repeated synthetic division by (z - z0)
        for k in 0..n {
            for j in (k + 1..n).rev() {
                let carry = &work[j] * &z0;
                work[j - 1] = &work[j - 1] + &carry;
            }
            out.push(work[k].clone());
        }
        out
    }

    /// Quotient and remainder of division by `d`, whose leading coefficient
    /// must be invertible.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = d.coeffs[dd].invert()?;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(&self.ctx), Poly::zero(&self.ctx)));
        };
        if nd < dd {
            return Ok((Poly::zero(&self.ctx), self.clone()));
        }
        let mut quot = vec![LcComplex::zero(&self.ctx); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = &rem[k + dd] * &lead_inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&q * dc);
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot, &self.ctx), Poly::new(rem, &self.ctx)))
    }

    /// Largest coefficient magnitude across all coefficients and exponents.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.max_abs_coefficient()))
    }

    /// Drops coefficient parts below `tol` times the largest coefficient.
    pub fn chop_relative(&self, tol: f64) -> Poly {
        let cut = tol * self.max_abs_coefficient();
        Poly::new(self.coeffs.iter().map(|c| c.chop(cut)).collect(), &self.ctx)
    }

    pub fn approx_eq(&self, other: &Poly, tol: f64) -> bool {
        let scale = self.max_abs_coefficient().max(other.max_abs_coefficient()).max(1.0);
        self.sub(other).max_abs_coefficient() <= tol * scale
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let standard = c.exponents().iter().all(|e| e.is_zero());
            let mut text = if standard {
                format_complex(c.coefficient(&crate::lc::Exponent::zero()))
            } else {
                format!("({c})")
            };
            let mut negative = false;
            if standard && text.starts_with('-') && !text.contains(" + ") && !text[1..].contains(" - ") {
                negative = true;
                text.remove(0);
            }
            if standard && text.contains(' ') {
                text = format!("({text})");
            }
            let power = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            let body = match (k, text.as_str()) {
                (0, _) => text,
                (_, "1") => power,
                _ => format!("{text}*{power}"),
            };
            match (first, negative) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_taylor() {
        let c = TruncationContext::default();
        // (z^3 + 2z + 5) / (z^2 + 1) = z, remainder z + 5
        let n = Poly::from_real(&[5.0, 2.0, 0.0, 1.0], &c);
        let d = Poly::from_real(&[1.0, 0.0, 1.0], &c);
        let (q, r) = n.div_rem(&d).unwrap();
        assert_eq!(q, Poly::from_real(&[0.0, 1.0], &c));
        assert_eq!(r, Poly::from_real(&[5.0, 1.0], &c));
        let t = n.taylor_at(Complex64::new(1.0, 0.0));
        let want = [8.0, 5.0, 3.0, 1.0];
        for (a, b) in t.iter().zip(want) {
            assert_eq!(a.standard_part().unwrap().re, b);
        }
        assert_eq!(d.to_string(), "z^2 + 1");
    }
}
