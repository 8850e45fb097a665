use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Exponent, Magnitude, TruncationContext, Valuation};
use crate::error::{Error, Result};

pub(crate) type Term = (Exponent, f64);

/// A truncated Levi-Civita series `Σ c_k s^{q_k}` with real coefficients.
///
/// Canonical form: exponents strictly increasing, coefficients nonzero, every
/// exponent at most `ctx.q_max`. Zero is the empty series.
#[derive(Clone, PartialEq)]
pub struct LcReal {
    terms: Vec<Term>,
    ctx: TruncationContext,
}

/// Sorts, merges equal exponents, drops zero coefficients and anything above
/// `limit`. With `prune` the context floor is applied as well.
pub(crate) fn canonicalize(
    mut terms: Vec<Term>,
    limit: &Exponent,
    floor: f64,
    prune: bool,
) -> Vec<Term> {
    terms.retain(|(e, _)| e <= limit);
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == e => *acc += c,
            _ => out.push((e, c)),
        }
    }
    out.retain(|(_, c)| *c != 0.0 && !(prune && c.abs() < floor));
    out
}

/// Cauchy product of two sorted term lists, keeping exponents `<= limit`.
pub(crate) fn mul_terms(a: &[Term], b: &[Term], limit: &Exponent, floor: f64) -> Vec<Term> {
    let mut products = Vec::with_capacity(a.len() * b.len());
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            if &e > limit {
                break;
            }
            products.push((e, ca * cb));
        }
    }
    canonicalize(products, limit, floor, true)
}

pub(crate) fn add_terms(a: &[Term], b: &[Term], limit: &Exponent, floor: f64) -> Vec<Term> {
    let mut all = Vec::with_capacity(a.len() + b.len());
    all.extend_from_slice(a);
    all.extend_from_slice(b);
    canonicalize(all, limit, floor, true)
}

impl LcReal {
    /// Builds a value from arbitrary terms. Duplicate exponents are merged and
    /// terms beyond `q_max` dropped; user coefficients are never floor-pruned.
    pub fn new(terms: Vec<(Exponent, f64)>, ctx: &TruncationContext) -> Self {
        LcReal {
            terms: canonicalize(terms, &ctx.q_max, ctx.coeff_floor, false),
            ctx: ctx.clone(),
        }
    }

    pub(crate) fn from_raw(terms: Vec<Term>, ctx: &TruncationContext) -> Self {
        LcReal {
            terms: canonicalize(terms, &ctx.q_max, ctx.coeff_floor, true),
            ctx: ctx.clone(),
        }
    }

    pub fn zero(ctx: &TruncationContext) -> Self {
        LcReal {
            terms: Vec::new(),
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &TruncationContext) -> Self {
        Self::constant(1.0, ctx)
    }

    pub fn constant(c: f64, ctx: &TruncationContext) -> Self {
        Self::monomial(Exponent::zero(), c, ctx)
    }

    pub fn monomial(q: Exponent, c: f64, ctx: &TruncationContext) -> Self {
        Self::new(vec![(q, c)], ctx)
    }

    /// The scale `s` itself.
    pub fn scale(ctx: &TruncationContext) -> Self {
        Self::monomial(Exponent::one(), 1.0, ctx)
    }

    /// `s^q`. Monomials beyond `q_max` truncate to zero.
    pub fn exp_scale(q: Exponent, ctx: &TruncationContext) -> Self {
        Self::monomial(q, 1.0, ctx)
    }

    pub fn terms(&self) -> &[(Exponent, f64)] {
        &self.terms
    }

    pub fn ctx(&self) -> &TruncationContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Exponent, f64)> {
        self.terms.first().map(|(e, c)| (e, *c))
    }

    /// Coefficient of `s^q` (0 when absent).
    pub fn coefficient(&self, q: &Exponent) -> f64 {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(q))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(e.clone()),
            None => Valuation::Infinite,
        }
    }

    /// Sign of the leading coefficient; 0 for zero.
    pub fn signum(&self) -> i32 {
        match self.leading() {
            Some((_, c)) if c > 0.0 => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    pub fn classify(&self) -> Magnitude {
        Magnitude::of(&self.valuation())
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.classify() == Magnitude::Infinitesimal
    }

    pub fn is_finite(&self) -> bool {
        self.classify() != Magnitude::Infinite
    }

    /// `e^{-v}`; 0 for the zero value.
    pub fn ultra_norm(&self) -> f64 {
        self.valuation().ultra_norm()
    }

    /// The exponent-0 coefficient of a finite value.
    pub fn standard_part(&self) -> Result<f64> {
        match self.valuation() {
            Valuation::Finite(v) if v.is_negative() => Err(Error::NotFinite(v.to_string())),
            _ => Ok(self.coefficient(&Exponent::zero())),
        }
    }

    /// `self - standard_part(self)` for finite values.
    pub fn infinitesimal_part(&self) -> Result<LcReal> {
        self.standard_part()?;
        Ok(LcReal {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.is_positive())
                .cloned()
                .collect(),
            ctx: self.ctx.clone(),
        })
    }

    fn check_ctx(&self, other: &LcReal) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &LcReal) -> Result<LcReal> {
        self.check_ctx(other)?;
        Ok(LcReal {
            terms: add_terms(&self.terms, &other.terms, &self.ctx.q_max, self.ctx.coeff_floor),
            ctx: self.ctx.clone(),
        })
    }

    pub fn checked_sub(&self, other: &LcReal) -> Result<LcReal> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &LcReal) -> Result<LcReal> {
        self.check_ctx(other)?;
        Ok(LcReal {
            terms: mul_terms(&self.terms, &other.terms, &self.ctx.q_max, self.ctx.coeff_floor),
            ctx: self.ctx.clone(),
        })
    }

    pub fn checked_div(&self, other: &LcReal) -> Result<LcReal> {
        self.checked_mul(&other.invert()?)
    }

    fn neg_ref(&self) -> LcReal {
        LcReal {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn scale_by(&self, k: f64) -> LcReal {
        LcReal::from_raw(
            self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            &self.ctx,
        )
    }

    /// Multiplies by `s^q`, re-truncating.
    pub fn shift_exponent(&self, q: &Exponent) -> LcReal {
        LcReal::from_raw(
            self.terms.iter().map(|(e, c)| (e + q, *c)).collect(),
            &self.ctx,
        )
    }

    /// Re-expresses the value in another context (drops terms beyond its `q_max`).
    pub fn with_context(&self, ctx: &TruncationContext) -> LcReal {
        LcReal::from_raw(self.terms.clone(), ctx)
    }

    /// Leading-term factorization `c * s^q * (1 + u)` with `v(u) > 0`.
    /// `u` is returned untruncated.
    fn factor(&self) -> Option<(Exponent, f64, Vec<Term>)> {
        let (q, c) = self.leading()?;
        let q = q.clone();
        let u = self.terms[1..]
            .iter()
            .map(|(e, x)| (e - &q, x / c))
            .collect();
        Some((q, c, u))
    }

    /// `1 / self`, via `c⁻¹ s^{-q} Σ (-u)^k` summed until the running power
    /// falls outside the truncation window.
    pub fn invert(&self) -> Result<LcReal> {
        let (q, c, u) = self.factor().ok_or(Error::DivisionByZero)?;
        let limit = &self.ctx.q_max + &q;
        let floor = self.ctx.coeff_floor;
        let minus_u: Vec<Term> = u.iter().map(|(e, x)| (e.clone(), -x)).collect();
        let series = geometric_like(&minus_u, &limit, floor, |_| 1.0);
        let neg_q = -&q;
        Ok(LcReal::from_raw(
            series.into_iter().map(|(e, x)| (&e + &neg_q, x / c)).collect(),
            &self.ctx,
        ))
    }

    /// Principal `n`-th root via `c^{1/n} s^{q/n} Σ binom(1/n, k) u^k`.
    pub fn nth_root(&self, n: u32) -> Result<LcReal> {
        if n == 0 {
            return Err(Error::Domain("root of order 0".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if self.signum() < 0 {
            if n.is_multiple_of(2) {
                return Err(Error::Domain(format!(
                    "even root ({n}) of a negative value"
                )));
            }
            return Ok(self.neg_ref().nth_root(n)?.neg_ref());
        }
        let (q, c, u) = self.factor().expect("nonzero");
        let q_root = q.div_int(n as i64);
        let limit = &self.ctx.q_max - &q_root;
        let alpha = 1.0 / n as f64;
        let series = geometric_like(&u, &limit, self.ctx.coeff_floor, |k| {
            // binom(alpha, k) / binom(alpha, k-1)
            (alpha - (k as f64 - 1.0)) / k as f64
        });
        let lead = c.powf(alpha);
        Ok(LcReal::from_raw(
            series
                .into_iter()
                .map(|(e, x)| (&e + &q_root, x * lead))
                .collect(),
            &self.ctx,
        ))
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, n: i64) -> Result<LcReal> {
        if n < 0 {
            return self.invert()?.powi(-n);
        }
        let mut result = LcReal::one(&self.ctx);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Total order of the field: the sign of the leading coefficient of `self - other`.
    pub fn compare(&self, other: &LcReal) -> Result<Ordering> {
        let diff = self.checked_sub(other)?;
        Ok(match diff.signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_abs_diff(&self, other: &LcReal) -> f64 {
        let mut i = 0;
        let mut j = 0;
        let mut worst: f64 = 0.0;
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let d = match ord {
                Ordering::Less => {
                    i += 1;
                    a[i - 1].1.abs()
                }
                Ordering::Greater => {
                    j += 1;
                    b[j - 1].1.abs()
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].1 - b[j - 1].1).abs()
                }
            };
            worst = worst.max(d);
        }
        worst
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, (_, c)| m.max(c.abs()))
    }

    /// Valuation of `self - other` ignoring coefficient differences at or below
    /// `rel_tol` times the larger operand's largest coefficient (at least 1).
    pub fn residual_valuation(&self, other: &LcReal, rel_tol: f64) -> Valuation {
        let scale = self
            .max_abs_coefficient()
            .max(other.max_abs_coefficient())
            .max(1.0);
        let diff = self.checked_sub(other).expect("same context");
        diff.terms
            .iter()
            .find(|(_, c)| c.abs() > rel_tol * scale)
            .map(|(e, _)| Valuation::Finite(e.clone()))
            .unwrap_or(Valuation::Infinite)
    }

    pub fn approx_eq(&self, other: &LcReal, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

/// `Σ_k b_k x^k` with `b_0 = 1` and `b_k = b_{k-1} * ratio(k)`, truncated at `limit`.
/// Stops once the running power vanishes from the window; `x` must have
/// positive valuation.
fn geometric_like(
    x: &[Term],
    limit: &Exponent,
    floor: f64,
    ratio: impl Fn(usize) -> f64,
) -> Vec<Term> {
    let mut sum: Vec<Term> = vec![(Exponent::zero(), 1.0)];
    if limit.is_negative() {
        return Vec::new();
    }
    let mut power: Vec<Term> = vec![(Exponent::zero(), 1.0)];
    let mut b = 1.0;
    let mut k = 0;
    loop {
        k += 1;
        power = mul_terms(&power, x, limit, 0.0);
        if power.is_empty() {
            break;
        }
        b *= ratio(k);
        if b == 0.0 {
            break;
        }
        let scaled: Vec<Term> = power.iter().map(|(e, c)| (e.clone(), c * b)).collect();
        sum = add_terms(&sum, &scaled, limit, floor);
    }
    sum
}

impl fmt::Display for LcReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
            if idx == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{}", format_monomial(e, mag))?;
        }
        Ok(())
    }
}

pub(crate) fn format_monomial(e: &Exponent, mag: f64) -> String {
    let power = if e.is_zero() {
        String::new()
    } else if *e == Exponent::one() {
        "s".to_string()
    } else if e.is_integer() && e.is_positive() {
        format!("s^{e}")
    } else {
        format!("s^({e})")
    };
    match (power.is_empty(), mag == 1.0) {
        (true, _) => format!("{mag}"),
        (false, true) => power,
        (false, false) => format!("{mag}*{power}"),
    }
}

impl fmt::Debug for LcReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LcReal({self})")
    }
}

impl PartialOrd for LcReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a LcReal> for &'a LcReal {
            type Output = LcReal;
            /// Panics if the operands have different truncation contexts.
            fn $method(self, rhs: &LcReal) -> LcReal {
                self.$checked(rhs).expect("LcReal operands must share a truncation context")
            }
        }
        impl $tr for LcReal {
            type Output = LcReal;
            fn $method(self, rhs: LcReal) -> LcReal {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &LcReal {
    type Output = LcReal;
    fn neg(self) -> LcReal {
        self.neg_ref()
    }
}

impl Neg for LcReal {
    type Output = LcReal;
    fn neg(self) -> LcReal {
        self.neg_ref()
    }
}

impl serde::Serialize for LcReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        super::LcComplex::from_real(self.clone()).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> TruncationContext {
        TruncationContext::default()
    }

    fn lc(terms: &[(i64, i64, f64)]) -> LcReal {
        LcReal::new(
            terms
                .iter()
                .map(|&(p, q, c)| (Exponent::ratio(p, q), c))
                .collect(),
            &ctx(),
        )
    }

    #[test]
    fn add_cancels_and_merges() {
        let a = lc(&[(0, 1, 1.0), (1, 1, 1.0)]);
        let b = lc(&[(0, 1, -1.0), (1, 1, 1.0)]);
        assert_eq!(&a + &b, lc(&[(1, 1, 2.0)]));
        let x = lc(&[(2, 1, 3.0), (3, 1, 1.0)]);
        let y = lc(&[(2, 1, -3.0)]);
        assert_eq!(&x + &y, lc(&[(3, 1, 1.0)]));
        assert_eq!(&x + &LcReal::zero(&ctx()), x);
    }

    #[test]
    fn mul_examples() {
        let root = lc(&[(1, 2, 1.0)]);
        assert_eq!(&root * &root, LcReal::scale(&ctx()));
        let p = lc(&[(0, 1, 1.0), (1, 1, 1.0)]);
        let m = lc(&[(0, 1, 1.0), (1, 1, -1.0)]);
        assert_eq!(&p * &m, lc(&[(0, 1, 1.0), (2, 1, -1.0)]));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let other = TruncationContext::with_q_max(Exponent::integer(3)).unwrap();
        let a = LcReal::one(&ctx());
        let b = LcReal::one(&other);
        assert_eq!(a.checked_add(&b), Err(Error::ContextMismatch));
        assert!(a.compare(&b).is_err());
    }

    #[test]
    fn truncation_drops_high_exponents() {
        let a = lc(&[(0, 1, 1.0), (7, 1, 5.0)]);
        assert_eq!(a, LcReal::one(&ctx()));
        let s3 = lc(&[(3, 1, 1.0)]);
        let s4 = lc(&[(4, 1, 1.0)]);
        assert!((&s3 * &s4).is_zero());
    }

    #[test]
    fn invert_examples() {
        let s = LcReal::scale(&ctx());
        assert_eq!(s.invert().unwrap(), lc(&[(-1, 1, 1.0)]));
        assert_eq!(LcReal::constant(2.0, &ctx()).invert().unwrap(), LcReal::constant(0.5, &ctx()));
        let one_minus_s = lc(&[(0, 1, 1.0), (1, 1, -1.0)]);
        let inv = one_minus_s.invert().unwrap();
        let expect = lc(&(0..=6).map(|k| (k, 1, 1.0)).collect::<Vec<_>>());
        assert_eq!(inv, expect);
        assert_eq!(LcReal::zero(&ctx()).invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn nth_root_examples() {
        let s2 = lc(&[(2, 1, 1.0)]);
        assert_eq!(s2.nth_root(2).unwrap(), LcReal::scale(&ctx()));
        assert!(matches!(
            LcReal::constant(-1.0, &ctx()).nth_root(2),
            Err(Error::Domain(_))
        ));
        let cube = LcReal::constant(-8.0, &ctx()).nth_root(3).unwrap();
        assert!((cube.coefficient(&Exponent::zero()) + 2.0).abs() < 1e-15);
        // sqrt(4 + 4s) = 2 (1 + s)^{1/2} = 2 + s - s^2/4 + s^3/8 - ...
        let r = lc(&[(0, 1, 4.0), (1, 1, 4.0)]).nth_root(2).unwrap();
        assert!((r.coefficient(&Exponent::integer(0)) - 2.0).abs() < 1e-15);
        assert!((r.coefficient(&Exponent::integer(1)) - 1.0).abs() < 1e-15);
        assert!((r.coefficient(&Exponent::integer(2)) + 0.25).abs() < 1e-15);
        assert!((r.coefficient(&Exponent::integer(3)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn compare_examples() {
        let s = LcReal::scale(&ctx());
        let tiny = LcReal::constant(1e-9, &ctx());
        assert_eq!(s.compare(&tiny).unwrap(), Ordering::Less);
        assert_eq!(s.compare(&s).unwrap(), Ordering::Equal);
        let big = LcReal::constant(1e9, &ctx());
        assert_eq!(s.invert().unwrap().compare(&big).unwrap(), Ordering::Greater);
    }

    #[test]
    fn display_reads_like_the_dsl() {
        let a = lc(&[(0, 1, 1.0), (1, 2, 3.0), (2, 1, -2.0)]);
        assert_eq!(a.to_string(), "1 + 3*s^(1/2) - 2*s^2");
        assert_eq!(lc(&[(-1, 1, 1.0)]).to_string(), "s^(-1)");
        assert_eq!(LcReal::zero(&ctx()).to_string(), "0");
    }
}
