use std::fmt;

use num_complex::Complex64;

use super::{DerivativeOracle, Jet};
use crate::error::{Error, Result};

/// Variables a smooth expression may depend on: the time variable `t` and
/// one parameter `z` (used for families such as `e^{-zt}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    Z,
}

/// A symbolic smooth function of `t` (and optionally `z`), closed under
/// differentiation. Build it through the simplifying constructors.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothExpr {
    Const(Complex64),
    Var(Var),
    Add(Box<SmoothExpr>, Box<SmoothExpr>),
    Mul(Box<SmoothExpr>, Box<SmoothExpr>),
    Neg(Box<SmoothExpr>),
    Pow(Box<SmoothExpr>, u32),
    Recip(Box<SmoothExpr>),
    Exp(Box<SmoothExpr>),
    Sin(Box<SmoothExpr>),
    Cos(Box<SmoothExpr>),
    Ln(Box<SmoothExpr>),
}

use SmoothExpr as E;

fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl SmoothExpr {
    pub fn t() -> SmoothExpr {
        E::Var(Var::T)
    }

    pub fn z() -> SmoothExpr {
        E::Var(Var::Z)
    }

    pub fn real(x: f64) -> SmoothExpr {
        E::Const(cplx(x))
    }

    pub fn constant(c: Complex64) -> SmoothExpr {
        E::Const(c)
    }

    pub fn zero() -> SmoothExpr {
        E::real(0.0)
    }

    pub fn one() -> SmoothExpr {
        E::real(1.0)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            E::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(cplx(0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(cplx(1.0))
    }

    pub fn add(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => E::Const(x + y),
            (Some(x), _) if x == cplx(0.0) => b,
            (_, Some(y)) if y == cplx(0.0) => a,
            _ => E::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        E::add(a, E::neg(b))
    }

    pub fn mul(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return E::Const(x * y),
            (Some(x), _) if x == cplx(0.0) => return E::zero(),
            (_, Some(y)) if y == cplx(0.0) => return E::zero(),
            (Some(x), _) if x == cplx(1.0) => return b,
            (_, Some(y)) if y == cplx(1.0) => return a,
            (Some(x), _) if x == cplx(-1.0) => return E::neg(b),
            (_, Some(y)) if y == cplx(-1.0) => return E::neg(a),
            (None, Some(_)) => return E::mul(b, a),
            _ => {}
        }
        // c1 * (c2 * x) -> (c1 c2) * x
        if let (Some(x), E::Mul(inner_c, rest)) = (a.as_const(), &b) {
            if let Some(y) = inner_c.as_const() {
                return E::mul(E::Const(x * y), (**rest).clone());
            }
        }
        E::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: SmoothExpr) -> SmoothExpr {
        match a {
            E::Const(c) => E::Const(-c),
            E::Neg(inner) => *inner,
            E::Mul(c, rest) if c.as_const().is_some() => {
                E::mul(E::Const(-c.as_const().unwrap()), *rest)
            }
            other => E::Neg(Box::new(other)),
        }
    }

    pub fn pow(a: SmoothExpr, n: u32) -> SmoothExpr {
        match (n, a.as_const()) {
            (0, _) => E::one(),
            (1, _) => a,
            (_, Some(c)) => E::Const(c.powu(n)),
            _ => E::Pow(Box::new(a), n),
        }
    }

    pub fn recip(a: SmoothExpr) -> SmoothExpr {
        match a.as_const() {
            Some(c) if c != cplx(0.0) => E::Const(c.inv()),
            _ => E::Recip(Box::new(a)),
        }
    }

    pub fn exp(a: SmoothExpr) -> SmoothExpr {
        match a.as_const() {
            Some(c) => E::Const(c.exp()),
            None => E::Exp(Box::new(a)),
        }
    }

    pub fn sin(a: SmoothExpr) -> SmoothExpr {
        match a.as_const() {
            Some(c) => E::Const(c.sin()),
            None => E::Sin(Box::new(a)),
        }
    }

    pub fn cos(a: SmoothExpr) -> SmoothExpr {
        match a.as_const() {
            Some(c) => E::Const(c.cos()),
            None => E::Cos(Box::new(a)),
        }
    }

    pub fn ln(a: SmoothExpr) -> SmoothExpr {
        E::Ln(Box::new(a))
    }

    /// Polynomial `Σ c_k t^k`.
    pub fn polynomial(coeffs: &[f64]) -> SmoothExpr {
        coeffs
            .iter()
            .enumerate()
            .fold(E::zero(), |acc, (k, c)| {
                E::add(acc, E::mul(E::real(*c), E::pow(E::t(), k as u32)))
            })
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            E::Const(_) => false,
            E::Var(w) => *w == v,
            E::Add(a, b) | E::Mul(a, b) => a.depends_on(v) || b.depends_on(v),
            E::Neg(a) | E::Pow(a, _) | E::Recip(a) | E::Exp(a) | E::Sin(a) | E::Cos(a)
            | E::Ln(a) => a.depends_on(v),
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> SmoothExpr {
        match self {
            E::Const(_) => E::zero(),
            E::Var(w) => E::real(if *w == v { 1.0 } else { 0.0 }),
            E::Add(a, b) => E::add(a.diff(v), b.diff(v)),
            E::Mul(a, b) => E::add(
                E::mul(a.diff(v), (**b).clone()),
                E::mul((**a).clone(), b.diff(v)),
            ),
            E::Neg(a) => E::neg(a.diff(v)),
            E::Pow(a, n) => E::mul(
                E::mul(E::real(*n as f64), E::pow((**a).clone(), n - 1)),
                a.diff(v),
            ),
            E::Recip(a) => E::neg(E::mul(
                a.diff(v),
                E::pow(E::recip((**a).clone()), 2),
            )),
            E::Exp(a) => E::mul(self.clone(), a.diff(v)),
            E::Sin(a) => E::mul(E::cos((**a).clone()), a.diff(v)),
            E::Cos(a) => E::neg(E::mul(E::sin((**a).clone()), a.diff(v))),
            E::Ln(a) => E::mul(a.diff(v), E::recip((**a).clone())),
        }
    }

    pub fn diff_n(&self, v: Var, n: usize) -> SmoothExpr {
        (0..n).fold(self.clone(), |e, _| e.diff(v))
    }

    /// Replaces `t` by `a t + b`.
    pub fn subst_affine(&self, a: f64, b: f64) -> SmoothExpr {
        self.subst(Var::T, &E::add(E::mul(E::real(a), E::t()), E::real(b)))
    }

    pub fn subst(&self, v: Var, with: &SmoothExpr) -> SmoothExpr {
        let go = |x: &SmoothExpr| x.subst(v, with);
        match self {
            E::Const(_) => self.clone(),
            E::Var(w) if *w == v => with.clone(),
            E::Var(_) => self.clone(),
            E::Add(a, b) => E::add(go(a), go(b)),
            E::Mul(a, b) => E::mul(go(a), go(b)),
            E::Neg(a) => E::neg(go(a)),
            E::Pow(a, n) => E::pow(go(a), *n),
            E::Recip(a) => E::recip(go(a)),
            E::Exp(a) => E::exp(go(a)),
            E::Sin(a) => E::sin(go(a)),
            E::Cos(a) => E::cos(go(a)),
            E::Ln(a) => E::ln(go(a)),
        }
    }

    /// Taylor jet in `t` at `t0`, with the parameter fixed at `z` (if bound).
    pub fn jet(&self, t0: Complex64, z: Option<Complex64>, order: usize) -> Result<Jet> {
        let go = |x: &SmoothExpr| x.jet(t0, z, order);
        Ok(match self {
            E::Const(c) => Jet::constant(*c, order),
            E::Var(Var::T) => Jet::variable(t0, order),
            E::Var(Var::Z) => Jet::constant(
                z.ok_or_else(|| Error::Domain("parameter z is unbound".into()))?,
                order,
            ),
            E::Add(a, b) => &go(a)? + &go(b)?,
            E::Mul(a, b) => &go(a)? * &go(b)?,
            E::Neg(a) => -&go(a)?,
            E::Pow(a, n) => go(a)?.powi(*n),
            E::Recip(a) => go(a)?.recip()?,
            E::Exp(a) => go(a)?.exp(),
            E::Sin(a) => go(a)?.sin_cos().0,
            E::Cos(a) => go(a)?.sin_cos().1,
            E::Ln(a) => go(a)?.ln()?,
        })
    }

    pub fn eval(&self, t: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        Ok(self.jet(t, z, 0)?.value())
    }

    pub fn eval_real(&self, t: f64) -> Result<Complex64> {
        self.eval(cplx(t), None)
    }

    fn precedence(&self, t: &str) -> u8 {
        match self {
            E::Add(..) => 1,
            E::Neg(_) => 2,
            E::Mul(..) | E::Recip(_) => 3,
            E::Pow(..) => 4,
            E::Const(c) if c.im != 0.0 && c.re != 0.0 => 1,
            E::Const(c) if c.re < 0.0 || c.im < 0.0 => 2,
            E::Var(Var::T) if t != "t" => 1,
            _ => 5,
        }
    }

    /// Renders the expression with `t` replaced by the given text, which is
    /// parenthesized where precedence requires it.
    pub fn render(&self, t: &str) -> String {
        let wrap = |e: &SmoothExpr, min_prec: u8| {
            if e.precedence(t) < min_prec {
                format!("({})", e.render(t))
            } else {
                e.render(t)
            }
        };
        match self {
            E::Const(c) => format_complex(*c),
            E::Var(Var::T) => t.to_string(),
            E::Var(Var::Z) => "z".to_string(),
            E::Add(a, b) => match &**b {
                E::Neg(inner) => format!("{} - {}", a.render(t), wrap(inner, 2)),
                E::Const(c) if c.im == 0.0 && c.re < 0.0 => format!("{} - {}", a.render(t), -c.re),
                _ => format!("{} + {}", a.render(t), wrap(b, 2)),
            },
            E::Mul(a, b) => match a.as_const() {
                Some(c) if c.im == 0.0 => format!("{}*{}", c.re, wrap(b, 4)),
                _ => format!("{}*{}", wrap(a, 3), wrap(b, 4)),
            },
            E::Neg(a) => format!("-{}", wrap(a, 3)),
            E::Pow(a, n) => format!("{}^{}", wrap(a, 5), n),
            E::Recip(a) => format!("1/{}", wrap(a, 5)),
            E::Exp(a) => format!("exp({})", a.render(t)),
            E::Sin(a) => format!("sin({})", a.render(t)),
            E::Cos(a) => format!("cos({})", a.render(t)),
            E::Ln(a) => format!("ln({})", a.render(t)),
        }
    }
}

/// Formats a complex constant in the expression syntax.
pub(crate) fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            "i".to_string()
        } else {
            format!("{}*i", c.im)
        }
    } else {
        format!("{} {} {}*i", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl DerivativeOracle for SmoothExpr {
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>> {
        Ok(self.jet(at, None, order)?.into_coeffs())
    }
}

/// A smooth expression with its parameter `z` fixed to a standard value.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundExpr {
    pub expr: SmoothExpr,
    pub z: Complex64,
}

impl DerivativeOracle for BoundExpr {
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>> {
        Ok(self.expr.jet(at, Some(self.z), order)?.into_coeffs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sin_is_cos() {
        let sin = E::sin(E::t());
        assert_eq!(sin.diff(Var::T), E::cos(E::t()));
        assert_eq!(E::cos(E::t()).diff(Var::T), E::neg(E::sin(E::t())));
    }

    #[test]
    fn simplification() {
        assert_eq!(E::mul(E::one(), E::t()), E::t());
        assert_eq!(E::add(E::zero(), E::t()), E::t());
        assert_eq!(E::mul(E::zero(), E::sin(E::t())), E::zero());
        assert_eq!(E::neg(E::neg(E::t())), E::t());
        assert_eq!(E::mul(E::real(2.0), E::mul(E::real(3.0), E::t())), E::mul(E::real(6.0), E::t()));
    }

    #[test]
    fn parametric_family() {
        // e^{-zt}: d/dz = -t e^{-zt}
        let fam = E::exp(E::neg(E::mul(E::z(), E::t())));
        let dz = fam.diff(Var::Z);
        let v = dz.eval(cplx(2.0), Some(cplx(0.5))).unwrap();
        assert!((v.re + 2.0 * (-1.0f64).exp()).abs() < 1e-14);
        assert!(fam.eval(cplx(1.0), None).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(E::sin(E::t()).to_string(), "sin(t)");
        assert_eq!(E::exp(E::mul(E::real(-2.0), E::t())).to_string(), "exp(-2*t)");
        assert_eq!(E::sub(E::t(), E::real(1.0)).to_string(), "t - 1");
        assert_eq!(E::polynomial(&[1.0, 0.0, 3.0]).to_string(), "1 + 3*t^2");
    }

    #[test]
    fn affine_substitution() {
        let f = E::sin(E::t()).subst_affine(2.0, 1.0);
        let v = f.eval_real(0.3).unwrap().re;
        assert!((v - (1.6f64).sin()).abs() < 1e-15);
    }
}
