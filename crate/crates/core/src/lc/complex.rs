use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use super::real::format_monomial;
use super::{Exponent, LcReal, Magnitude, TruncationContext, Valuation};
use crate::error::{Error, Result};

/// An element of `Ĉ = R̂(i)`: a pair of truncated series sharing one context.
#[derive(Clone, PartialEq)]
pub struct LcComplex {
    re: LcReal,
    im: LcReal,
}

/// One serialized term: `{exp: "p/q", re, im}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: String,
    #[serde(serialize_with = "serialize_coeff")]
    pub re: f64,
    #[serde(serialize_with = "serialize_coeff")]
    pub im: f64,
}

/// Integral coefficients are written as JSON integers (`1`, not `1.0`).
pub(crate) fn serialize_coeff<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        s.serialize_i64(*x as i64)
    } else {
        s.serialize_f64(*x)
    }
}

impl LcComplex {
    pub fn new(re: LcReal, im: LcReal) -> Result<Self> {
        if re.ctx() != im.ctx() {
            return Err(Error::ContextMismatch);
        }
        Ok(LcComplex { re, im })
    }

    pub fn from_real(re: LcReal) -> Self {
        let im = LcReal::zero(re.ctx());
        LcComplex { re, im }
    }

    pub fn zero(ctx: &TruncationContext) -> Self {
        Self::from_real(LcReal::zero(ctx))
    }

    pub fn one(ctx: &TruncationContext) -> Self {
        Self::from_real(LcReal::one(ctx))
    }

    pub fn constant(c: Complex64, ctx: &TruncationContext) -> Self {
        LcComplex {
            re: LcReal::constant(c.re, ctx),
            im: LcReal::constant(c.im, ctx),
        }
    }

    pub fn i(ctx: &TruncationContext) -> Self {
        Self::constant(Complex64::i(), ctx)
    }

    pub fn monomial(q: Exponent, c: Complex64, ctx: &TruncationContext) -> Self {
        LcComplex {
            re: LcReal::monomial(q.clone(), c.re, ctx),
            im: LcReal::monomial(q, c.im, ctx),
        }
    }

    pub fn re(&self) -> &LcReal {
        &self.re
    }

    pub fn im(&self) -> &LcReal {
        &self.im
    }

    pub fn ctx(&self) -> &TruncationContext {
        self.re.ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `v(z) = v(|z|) = min(v(re), v(im))`.
    pub fn valuation(&self) -> Valuation {
        self.re.valuation().min(self.im.valuation())
    }

    pub fn classify(&self) -> Magnitude {
        Magnitude::of(&self.valuation())
    }

    pub fn is_finite(&self) -> bool {
        self.classify() != Magnitude::Infinite
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.classify() == Magnitude::Infinitesimal
    }

    pub fn ultra_norm(&self) -> f64 {
        self.valuation().ultra_norm()
    }

    pub fn standard_part(&self) -> Result<Complex64> {
        match self.valuation() {
            Valuation::Finite(v) if v.is_negative() => Err(Error::NotFinite(v.to_string())),
            _ => Ok(self.coefficient(&Exponent::zero())),
        }
    }

    pub fn infinitesimal_part(&self) -> Result<LcComplex> {
        Ok(LcComplex {
            re: self.re.infinitesimal_part()?,
            im: self.im.infinitesimal_part()?,
        })
    }

    pub fn coefficient(&self, q: &Exponent) -> Complex64 {
        Complex64::new(self.re.coefficient(q), self.im.coefficient(q))
    }

    /// All exponents carrying a nonzero real or imaginary coefficient, ascending.
    pub fn exponents(&self) -> Vec<Exponent> {
        let set: BTreeSet<Exponent> = self
            .re
            .terms()
            .iter()
            .chain(self.im.terms())
            .map(|(e, _)| e.clone())
            .collect();
        set.into_iter().collect()
    }

    pub fn conj(&self) -> LcComplex {
        LcComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn checked_add(&self, other: &LcComplex) -> Result<LcComplex> {
        Ok(LcComplex {
            re: self.re.checked_add(&other.re)?,
            im: self.im.checked_add(&other.im)?,
        })
    }

    pub fn checked_sub(&self, other: &LcComplex) -> Result<LcComplex> {
        Ok(LcComplex {
            re: self.re.checked_sub(&other.re)?,
            im: self.im.checked_sub(&other.im)?,
        })
    }

    pub fn checked_mul(&self, other: &LcComplex) -> Result<LcComplex> {
        let (a, b, c, d) = (&self.re, &self.im, &other.re, &other.im);
        Ok(LcComplex {
            re: a.checked_mul(c)?.checked_sub(&b.checked_mul(d)?)?,
            im: a.checked_mul(d)?.checked_add(&b.checked_mul(c)?)?,
        })
    }

    /// `1/(a+ib) = (a-ib)/(a²+b²)`; the leading term of `a²+b²` never cancels.
    pub fn invert(&self) -> Result<LcComplex> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Self::from_real(self.re.invert()?));
        }
        let norm2 = &(&self.re * &self.re) + &(&self.im * &self.im);
        let inv = norm2.invert()?;
        Ok(LcComplex {
            re: &self.re * &inv,
            im: -(&self.im * &inv),
        })
    }

    pub fn checked_div(&self, other: &LcComplex) -> Result<LcComplex> {
        self.checked_mul(&other.invert()?)
    }

    pub fn scale_real(&self, k: f64) -> LcComplex {
        LcComplex {
            re: self.re.scale_by(k),
            im: self.im.scale_by(k),
        }
    }

    pub fn scale_by(&self, k: Complex64) -> LcComplex {
        if k.im == 0.0 {
            return self.scale_real(k.re);
        }
        LcComplex {
            re: &self.re.scale_by(k.re) - &self.im.scale_by(k.im),
            im: &self.re.scale_by(k.im) + &self.im.scale_by(k.re),
        }
    }

    pub fn mul_real(&self, x: &LcReal) -> Result<LcComplex> {
        Ok(LcComplex {
            re: self.re.checked_mul(x)?,
            im: self.im.checked_mul(x)?,
        })
    }

    pub fn shift_exponent(&self, q: &Exponent) -> LcComplex {
        LcComplex {
            re: self.re.shift_exponent(q),
            im: self.im.shift_exponent(q),
        }
    }

    pub fn with_context(&self, ctx: &TruncationContext) -> LcComplex {
        LcComplex {
            re: self.re.with_context(ctx),
            im: self.im.with_context(ctx),
        }
    }

    pub fn powi(&self, n: i64) -> Result<LcComplex> {
        if n < 0 {
            return self.invert()?.powi(-n);
        }
        let mut result = LcComplex::one(self.ctx());
        for _ in 0..n {
            result = &result * self;
        }
        Ok(result)
    }

    pub fn max_abs_diff(&self, other: &LcComplex) -> f64 {
        self.re
            .max_abs_diff(&other.re)
            .max(self.im.max_abs_diff(&other.im))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.re.max_abs_coefficient().max(self.im.max_abs_coefficient())
    }

    pub fn approx_eq(&self, other: &LcComplex, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Drops coefficients with magnitude `<= tol`.
    pub fn chop(&self, tol: f64) -> LcComplex {
        let keep = |x: &LcReal| {
            LcReal::new(
                x.terms()
                    .iter()
                    .filter(|(_, c)| c.abs() > tol)
                    .cloned()
                    .collect(),
                x.ctx(),
            )
        };
        LcComplex {
            re: keep(&self.re),
            im: keep(&self.im),
        }
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.exponents()
            .into_iter()
            .map(|e| {
                let c = self.coefficient(&e);
                TermRecord {
                    exp: e.to_string(),
                    re: c.re,
                    im: c.im,
                }
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord], ctx: &TruncationContext) -> Result<LcComplex> {
        let mut re = Vec::new();
        let mut im = Vec::new();
        for r in records {
            let e: Exponent = r.exp.parse()?;
            re.push((e.clone(), r.re));
            im.push((e, r.im));
        }
        Ok(LcComplex {
            re: LcReal::new(re, ctx),
            im: LcReal::new(im, ctx),
        })
    }
}

impl Serialize for LcComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl fmt::Display for LcComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let exps = self.exponents();
        for (idx, e) in exps.iter().enumerate() {
            let c = self.coefficient(e);
            let term = if c.im == 0.0 {
                signed_monomial(e, c.re)
            } else if c.re == 0.0 {
                format!("{}*i", signed_monomial(e, c.im))
            } else if e.is_zero() {
                format!("({}{:+}*i)", c.re, c.im)
            } else {
                format!("({}{:+}*i)*{}", c.re, c.im, format_monomial(e, 1.0))
            };
            match (idx, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

fn signed_monomial(e: &Exponent, c: f64) -> String {
    if c < 0.0 {
        format!("-{}", format_monomial(e, -c))
    } else {
        format_monomial(e, c)
    }
}

impl fmt::Debug for LcComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LcComplex({self})")
    }
}

impl From<LcReal> for LcComplex {
    fn from(re: LcReal) -> Self {
        LcComplex::from_real(re)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a LcComplex> for &'a LcComplex {
            type Output = LcComplex;
            /// Panics if the operands have different truncation contexts.
            fn $method(self, rhs: &LcComplex) -> LcComplex {
                self.$checked(rhs)
                    .expect("LcComplex operands must share a truncation context")
            }
        }
        impl $tr for LcComplex {
            type Output = LcComplex;
            fn $method(self, rhs: LcComplex) -> LcComplex {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &LcComplex {
    type Output = LcComplex;
    fn neg(self) -> LcComplex {
        LcComplex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for LcComplex {
    type Output = LcComplex;
    fn neg(self) -> LcComplex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> TruncationContext {
        TruncationContext::default()
    }

    #[test]
    fn standard_part_and_classify() {
        let c = ctx();
        let two_plus = &LcComplex::constant(Complex64::new(2.0, 0.0), &c)
            + &LcComplex::from_real(LcReal::monomial(Exponent::one(), 5.0, &c));
        assert_eq!(two_plus.standard_part().unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(two_plus.classify(), Magnitude::FiniteNonInfinitesimal);
        let s = LcComplex::from_real(LcReal::scale(&c));
        assert_eq!(s.standard_part().unwrap(), Complex64::new(0.0, 0.0));
        let inv = s.invert().unwrap();
        assert!(matches!(inv.standard_part(), Err(Error::NotFinite(_))));
        assert_eq!(
            LcComplex::from_real(LcReal::monomial(Exponent::ratio(-1, 2), 1.0, &c)).classify(),
            Magnitude::Infinite
        );
        assert_eq!(
            LcComplex::from_real(LcReal::monomial(Exponent::integer(3), 1.0, &c)).classify(),
            Magnitude::Infinitesimal
        );
    }

    #[test]
    fn ultra_norm_examples() {
        let c = ctx();
        let s = LcComplex::from_real(LcReal::scale(&c));
        assert!((s.ultra_norm() - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(LcComplex::zero(&c).ultra_norm(), 0.0);
        let seven = &LcComplex::constant(Complex64::new(7.0, 0.0), &c) + &s;
        assert_eq!(seven.ultra_norm(), 1.0);
    }

    #[test]
    fn complex_valuation_is_valuation_of_modulus() {
        let c = ctx();
        let z = LcComplex::new(
            LcReal::monomial(Exponent::integer(2), 1.0, &c),
            LcReal::monomial(Exponent::integer(1), 3.0, &c),
        )
        .unwrap();
        assert_eq!(z.valuation(), Valuation::Finite(Exponent::one()));
        let prod = &z * &z.invert().unwrap();
        assert!(prod.approx_eq(&LcComplex::one(&c), 1e-12));
    }

    #[test]
    fn records_format() {
        let c = ctx();
        let x = LcComplex::from_real(LcReal::new(
            vec![(Exponent::zero(), 1.0), (Exponent::one(), 2.0)],
            &c,
        ));
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"[{"exp":"0","re":1,"im":0},{"exp":"1","re":2,"im":0}]"#
        );
        let back = LcComplex::from_records(&x.to_records(), &c).unwrap();
        assert_eq!(back, x);
    }
}
