use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gf::{Algebra, GenFunction};
use crate::laplace::{ClassicalFn, DomainElement, ImageTerm, LaplaceImage, Oscillation, Poly, RhsAtom};
use crate::lc::{exp_lc, Exponent, LcComplex, LcReal, TruncationContext};
use crate::smooth::SmoothExpr;

use super::ast::{BinOp, Expr, Func, Symbol};

fn unsupported<T>(what: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(what.into()))
}

fn is_standard(c: &LcComplex) -> bool {
    c.exponents().iter().all(|e| e.is_zero())
}

fn standard_real(c: &LcComplex, what: &str) -> Result<f64> {
    let v = c.standard_part()?;
    if !is_standard(c) || v.im != 0.0 {
        return Err(Error::Domain(format!("{what} must be a real standard number, got {c}")));
    }
    Ok(v.re)
}

fn real_part(c: &LcComplex, what: &str) -> Result<LcReal> {
    if !c.im().is_zero() {
        return Err(Error::Domain(format!("{what} must be real, got {c}")));
    }
    Ok(c.re().clone())
}

fn lc_pow(x: &LcComplex, e: &Exponent) -> Result<LcComplex> {
    if let Some(n) = e.to_i64() {
        return x.powi(n);
    }
    let q: u32 = e
        .denom()
        .try_into()
        .map_err(|_| Error::Domain(format!("exponent {e} is out of range")))?;
    let p: i64 = e
        .numer()
        .try_into()
        .map_err(|_| Error::Domain(format!("exponent {e} is out of range")))?;
    let root = real_part(x, "the base of a fractional power")?.nth_root(q)?;
    LcComplex::from_real(root).powi(p)
}

/// `sin` and `cos` through `exp(±ix)`.
fn lc_trig(f: Func, x: &LcComplex) -> Result<LcComplex> {
    let ctx = x.ctx();
    let ix = x.checked_mul(&LcComplex::i(ctx))?;
    let (a, b) = (exp_lc(&ix)?, exp_lc(&-&ix)?);
    Ok(match f {
        Func::Sin => (&a - &b).scale_by(Complex64::new(0.0, -0.5)),
        _ => (&a + &b).scale_real(0.5),
    })
}

/// Evaluates a scalar expression over `s` and `i`.
pub fn eval_lc(e: &Expr, ctx: &TruncationContext) -> Result<LcComplex> {
    Ok(match e {
        Expr::Num(x) => LcComplex::constant(Complex64::new(*x, 0.0), ctx),
        Expr::Sym(Symbol::S) => LcComplex::from_real(LcReal::scale(ctx)),
        Expr::Sym(Symbol::I) => LcComplex::i(ctx),
        Expr::Sym(other) => return Err(Error::Domain(format!("{other} is not a scalar"))),
        Expr::Neg(a) => -&eval_lc(a, ctx)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_lc(a, ctx)?, eval_lc(b, ctx)?);
            match op {
                BinOp::Add => a.checked_add(&b)?,
                BinOp::Sub => a.checked_sub(&b)?,
                BinOp::Mul => a.checked_mul(&b)?,
                BinOp::Div => a.checked_div(&b)?,
            }
        }
        Expr::Pow(a, p) => lc_pow(&eval_lc(a, ctx)?, p)?,
        Expr::Call(Func::Exp, a) => exp_lc(&eval_lc(a, ctx)?)?,
        Expr::Call(f @ (Func::Sin | Func::Cos), a) => lc_trig(*f, &eval_lc(a, ctx)?)?,
        Expr::Call(f, _) => return Err(Error::Domain(format!("{} is not a scalar function", f.name()))),
    })
}

/// `a*v + b` with scalar `a`, `b`, if `e` has that shape in the variable `v`.
pub fn affine(e: &Expr, v: Symbol, ctx: &TruncationContext) -> Option<(LcComplex, LcComplex)> {
    let zero = LcComplex::zero(ctx);
    if !e.mentions(v) {
        return eval_lc(e, ctx).ok().map(|c| (zero, c));
    }
    match e {
        Expr::Sym(s) if *s == v => Some((LcComplex::one(ctx), zero)),
        Expr::Neg(a) => affine(a, v, ctx).map(|(a, b)| (-&a, -&b)),
        Expr::Bin(op, a, b) => {
            let (a1, b1) = affine(a, v, ctx)?;
            let (a2, b2) = affine(b, v, ctx)?;
            match op {
                BinOp::Add => Some((&a1 + &a2, &b1 + &b2)),
                BinOp::Sub => Some((&a1 - &a2, &b1 - &b2)),
                BinOp::Mul if a1.is_zero() => Some((&b1 * &a2, &b1 * &b2)),
                BinOp::Mul if a2.is_zero() => Some((&a1 * &b2, &b1 * &b2)),
                BinOp::Div if a2.is_zero() => {
                    let inv = b2.invert().ok()?;
                    Some((&a1 * &inv, &b1 * &inv))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Intermediate values while evaluating a time-domain expression.
#[derive(Clone, Debug)]
enum Val {
    Lc(LcComplex),
    Smooth(SmoothExpr),
    Gen(GenFunction),
}

impl Val {
    fn into_gen(self, alg: &Algebra) -> GenFunction {
        match self {
            Val::Lc(c) => alg.constant(c),
            Val::Smooth(f) => alg.embed_smooth(f),
            Val::Gen(g) => g,
        }
    }

    /// A standard constant becomes a smooth expression; anything else stays.
    fn as_smooth(&self) -> Option<SmoothExpr> {
        match self {
            Val::Smooth(f) => Some(f.clone()),
            Val::Lc(c) if is_standard(c) => c.standard_part().ok().map(SmoothExpr::constant),
            _ => None,
        }
    }
}

fn smooth_call(f: Func, arg: SmoothExpr) -> SmoothExpr {
    match f {
        Func::Sin => SmoothExpr::sin(arg),
        Func::Cos => SmoothExpr::cos(arg),
        _ => SmoothExpr::exp(arg),
    }
}

/// `atom(a t + b)` as the translate of `atom(a t)` by `-b/a`.
fn affine_image(atom: GenFunction, a: &LcComplex, b: &LcComplex) -> Result<GenFunction> {
    let a = standard_real(a, "the slope of the argument")?;
    if a == 0.0 {
        return Err(Error::Domain("the argument does not depend on t".into()));
    }
    let b = real_part(b, "the offset of the argument")?;
    let scaled = if a == 1.0 { atom } else { atom.compose_affine(a, 0.0)? };
    scaled.translate(&b.scale_by(-1.0 / a))
}

fn eval_val(e: &Expr, alg: &Algebra) -> Result<Val> {
    let ctx = alg.ctx();
    if !e.mentions(Symbol::T) && !e.mentions_func(&|f| matches!(f, Func::H | Func::Delta | Func::DeltaN(_))) {
        return eval_lc(e, ctx).map(Val::Lc);
    }
    match e {
        Expr::Sym(Symbol::T) => Ok(Val::Smooth(SmoothExpr::t())),
        Expr::Sym(other) => Err(Error::Domain(format!("{other} cannot appear in a time-domain expression"))),
        Expr::Num(_) => unreachable!("constants are scalars"),
        Expr::Neg(a) => Ok(match eval_val(a, alg)? {
            Val::Lc(c) => Val::Lc(-&c),
            Val::Smooth(f) => Val::Smooth(SmoothExpr::neg(f)),
            Val::Gen(g) => Val::Gen(-&g),
        }),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_val(a, alg)?, eval_val(b, alg)?);
            if let (Some(x), Some(y)) = (a.as_smooth(), b.as_smooth()) {
                return Ok(Val::Smooth(match op {
                    BinOp::Add => SmoothExpr::add(x, y),
                    BinOp::Sub => SmoothExpr::sub(x, y),
                    BinOp::Mul => SmoothExpr::mul(x, y),
                    BinOp::Div => SmoothExpr::mul(x, SmoothExpr::recip(y)),
                }));
            }
            match (op, a, b) {
                (BinOp::Mul, Val::Lc(c), other) | (BinOp::Mul, other, Val::Lc(c)) => {
                    Ok(Val::Gen(other.into_gen(alg).scale(&c)))
                }
                (BinOp::Div, other, Val::Lc(c)) => Ok(Val::Gen(other.into_gen(alg).scale(&c.invert()?))),
                (BinOp::Div, _, _) => unsupported("division by a non-constant generalized function"),
                (op, a, b) => {
                    let (a, b) = (a.into_gen(alg), b.into_gen(alg));
                    Ok(Val::Gen(match op {
                        BinOp::Add => &a + &b,
                        BinOp::Sub => &a - &b,
                        _ => &a * &b,
                    }))
                }
            }
        }
        Expr::Pow(a, p) => {
            let n = p.to_i64();
            match (eval_val(a, alg)?, n) {
                (Val::Smooth(f), Some(n)) if n >= 0 => Ok(Val::Smooth(SmoothExpr::pow(f, n as u32))),
                (Val::Smooth(f), Some(n)) => Ok(Val::Smooth(SmoothExpr::recip(SmoothExpr::pow(f, (-n) as u32)))),
                (Val::Gen(g), Some(n)) if n >= 0 => Ok(Val::Gen(g.powi(n as usize))),
                (Val::Lc(c), _) => Ok(Val::Lc(lc_pow(&c, p)?)),
                _ => unsupported(format!("power {p} of a non-scalar expression")),
            }
        }
        Expr::Call(f, arg) => {
            let lin = affine(arg, Symbol::T, ctx);
            match f {
                Func::H | Func::Delta | Func::DeltaN(_) => {
                    let (a, b) = lin.ok_or_else(|| {
                        Error::Unsupported(format!("{} needs an argument of the form a*t + b", f.name()))
                    })?;
                    let atom = match f {
                        Func::H => alg.heaviside(),
                        Func::Delta => alg.delta(0.0, 0),
                        Func::DeltaN(k) => alg.delta(0.0, *k as usize),
                        _ => unreachable!(),
                    };
                    Ok(Val::Gen(affine_image(atom, &a, &b)?))
                }
                _ => {
                    if let Some((a, b)) = &lin {
                        if !is_standard(b) && is_standard(a) && !a.is_zero() {
                            let a0 = standard_real(a, "the slope of the argument")?;
                            let body = alg.embed_smooth(smooth_call(*f, SmoothExpr::t()));
                            return Ok(Val::Gen(affine_image(body, &LcComplex::constant(Complex64::new(a0, 0.0), ctx), b)?));
                        }
                    }
                    match eval_val(arg, alg)? {
                        Val::Smooth(x) => Ok(Val::Smooth(smooth_call(*f, x))),
                        Val::Lc(c) if *f == Func::Exp => Ok(Val::Lc(exp_lc(&c)?)),
                        Val::Lc(c) => Ok(Val::Lc(lc_trig(*f, &c)?)),
                        Val::Gen(_) => unsupported(format!("{} of a generalized function", f.name())),
                    }
                }
            }
        }
    }
}

/// Evaluates a time-domain expression to a generalized function.
pub fn eval_gen(e: &Expr, alg: &Algebra) -> Result<GenFunction> {
    Ok(eval_val(e, alg)?.into_gen(alg))
}

/// Splits a sum into signed summands.
pub fn summands(e: &Expr) -> Vec<(bool, &Expr)> {
    fn go<'a>(e: &'a Expr, positive: bool, out: &mut Vec<(bool, &'a Expr)>) {
        match e {
            Expr::Bin(BinOp::Add, a, b) => {
                go(a, positive, out);
                go(b, positive, out);
            }
            Expr::Bin(BinOp::Sub, a, b) => {
                go(a, positive, out);
                go(b, !positive, out);
            }
            Expr::Neg(a) if matches!(**a, Expr::Bin(BinOp::Add | BinOp::Sub, ..)) => go(a, !positive, out),
            other => out.push((positive, other)),
        }
    }
    let mut out = Vec::new();
    go(e, true, &mut out);
    out
}

fn factors(e: &Expr, out: &mut Vec<(bool, Expr)>) {
    match e {
        Expr::Bin(BinOp::Mul, a, b) => {
            factors(a, out);
            factors(b, out);
        }
        Expr::Bin(BinOp::Div, a, b) => {
            factors(a, out);
            out.push((false, (**b).clone()));
        }
        Expr::Neg(a) => {
            out.push((true, Expr::Neg(Box::new(Expr::Num(1.0)))));
            factors(a, out);
        }
        other => out.push((true, other.clone())),
    }
}

/// Matches `c t^n e^(αt) osc(ωt)`.
pub fn match_classical(e: &Expr, ctx: &TruncationContext) -> Result<(LcComplex, ClassicalFn)> {
    let mut parts = Vec::new();
    factors(e, &mut parts);
    let mut coeff = LcComplex::one(ctx);
    let mut f = ClassicalFn::one();
    let not_classical = || Error::Unsupported(format!("{e} is not an exponential polynomial"));
    for (numerator, factor) in parts {
        if !factor.mentions(Symbol::T) {
            let c = eval_lc(&factor, ctx)?;
            coeff = if numerator { coeff.checked_mul(&c)? } else { coeff.checked_div(&c)? };
            continue;
        }
        if !numerator {
            return Err(not_classical());
        }
        match &factor {
            Expr::Sym(Symbol::T) => f.power += 1,
            Expr::Pow(base, p) if **base == Expr::Sym(Symbol::T) => {
                let n = p.to_i64().filter(|n| *n >= 0).ok_or_else(not_classical)?;
                f.power += n as u32;
            }
            Expr::Call(func @ (Func::Exp | Func::Sin | Func::Cos), arg) => {
                let (a, b) = affine(arg, Symbol::T, ctx).ok_or_else(not_classical)?;
                let a = standard_real(&a, "a rate")?;
                match func {
                    Func::Exp => {
                        f.alpha += a;
                        coeff = coeff.checked_mul(&exp_lc(&b)?)?;
                    }
                    _ => {
                        if f.osc != Oscillation::One || !b.is_zero() {
                            return Err(not_classical());
                        }
                        f.omega = a;
                        f.osc = if *func == Func::Sin { Oscillation::Sin } else { Oscillation::Cos };
                    }
                }
            }
            _ => return Err(not_classical()),
        }
    }
    Ok((coeff, f))
}

fn has_singular(e: &Expr) -> bool {
    e.mentions_func(&|f| matches!(f, Func::H | Func::Delta | Func::DeltaN(_)))
}

/// Splits an expression into classical parts and generalized parts.
pub fn eval_domain(e: &Expr, alg: &Algebra) -> Result<DomainElement> {
    let ctx = alg.ctx();
    let mut out = DomainElement::default();
    for (positive, term) in summands(e) {
        let sign = LcComplex::constant(Complex64::new(if positive { 1.0 } else { -1.0 }, 0.0), ctx);
        if has_singular(term) {
            let psi = eval_gen(term, alg)?;
            out = out.plus(DomainElement::generalized(sign, psi));
        } else {
            let (c, f) = match_classical(term, ctx)?;
            out = out.plus(DomainElement::classical(&c * &sign, f));
        }
    }
    Ok(out)
}

/// Right-hand side atoms for the classical table.
pub fn eval_rhs_atoms(e: &Expr, ctx: &TruncationContext) -> Result<Vec<(LcComplex, RhsAtom)>> {
    let mut out = Vec::new();
    for (positive, term) in summands(e) {
        let sign = if positive { 1.0 } else { -1.0 };
        if !has_singular(term) {
            let (c, f) = match_classical(term, ctx)?;
            out.push((c.scale_real(sign), RhsAtom::Classical(f)));
            continue;
        }
        let mut parts = Vec::new();
        factors(term, &mut parts);
        let mut coeff = LcComplex::constant(Complex64::new(sign, 0.0), ctx);
        let mut atom = None;
        for (numerator, factor) in parts {
            match (&factor, numerator, &atom) {
                (Expr::Call(f @ (Func::Delta | Func::DeltaN(_)), arg), true, None) => {
                    let (a, b) = affine(arg, Symbol::T, ctx)
                        .ok_or_else(|| Error::Unsupported(format!("{factor} needs an argument t - a")))?;
                    if standard_real(&a, "the slope")? != 1.0 {
                        return unsupported(format!("{factor}: the table only covers delta(t - a)"));
                    }
                    let order = match f {
                        Func::DeltaN(k) => *k as usize,
                        _ => 0,
                    };
                    let delay = real_part(&-&b, "a delay")?;
                    atom = Some(RhsAtom::Delta { order, delay });
                }
                (f, _, _) if !f.mentions(Symbol::T) && !has_singular(f) => {
                    let c = eval_lc(f, ctx)?;
                    coeff = if numerator { coeff.checked_mul(&c)? } else { coeff.checked_div(&c)? };
                }
                _ => return unsupported(format!("{term} is not in the classical table")),
            }
        }
        out.push((coeff, atom.expect("a singular factor")));
    }
    Ok(out)
}

/// Coefficients `[a0, a1, a2]` of a left-hand side linear in `y`, `y'`, `y''`.
pub fn linear_in_y(e: &Expr, ctx: &TruncationContext) -> Result<[f64; 3]> {
    let bad = || Error::Unsupported(format!("{e} is not linear in y, y', y''"));
    let scale = |v: [f64; 3], k: f64| [v[0] * k, v[1] * k, v[2] * k];
    Ok(match e {
        Expr::Sym(Symbol::Y(k)) => {
            let mut v = [0.0; 3];
            v[*k as usize] = 1.0;
            v
        }
        Expr::Neg(a) => scale(linear_in_y(a, ctx)?, -1.0),
        Expr::Bin(op, a, b) => {
            let has_y = |x: &Expr| (0..3).any(|k| x.mentions(Symbol::Y(k)));
            match op {
                BinOp::Add | BinOp::Sub => {
                    let (x, y) = (linear_in_y(a, ctx)?, linear_in_y(b, ctx)?);
                    let sign = if *op == BinOp::Add { 1.0 } else { -1.0 };
                    [x[0] + sign * y[0], x[1] + sign * y[1], x[2] + sign * y[2]]
                }
                BinOp::Mul if !has_y(a) => scale(linear_in_y(b, ctx)?, standard_real(&eval_lc(a, ctx)?, "a coefficient")?),
                BinOp::Mul if !has_y(b) => scale(linear_in_y(a, ctx)?, standard_real(&eval_lc(b, ctx)?, "a coefficient")?),
                BinOp::Div if !has_y(b) => scale(linear_in_y(a, ctx)?, 1.0 / standard_real(&eval_lc(b, ctx)?, "a coefficient")?),
                _ => return Err(bad()),
            }
        }
        _ => return Err(bad()),
    })
}

fn image_terms_mul(a: &[ImageTerm], b: &[ImageTerm]) -> Vec<ImageTerm> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(ImageTerm {
                num: x.num.mul(&y.num),
                den: x.den.mul(&y.den),
                shift: &x.shift + &y.shift,
            });
        }
    }
    out
}

fn image_terms(e: &Expr, ctx: &TruncationContext) -> Result<Vec<ImageTerm>> {
    let constant = |c: LcComplex| {
        vec![ImageTerm {
            num: Poly::constant(c),
            den: Poly::one(ctx),
            shift: LcReal::zero(ctx),
        }]
    };
    if !e.mentions(Symbol::Z) {
        return Ok(constant(eval_lc(e, ctx)?));
    }
    Ok(match e {
        Expr::Sym(Symbol::Z) => vec![ImageTerm {
            num: Poly::monomial(1, LcComplex::one(ctx)),
            den: Poly::one(ctx),
            shift: LcReal::zero(ctx),
        }],
        Expr::Neg(a) => image_terms(&Expr::bin(BinOp::Mul, Expr::Neg(Box::new(Expr::Num(1.0))), (**a).clone()), ctx)?,
        Expr::Bin(op, a, b) => {
            let (x, y) = (image_terms(a, ctx)?, image_terms(b, ctx)?);
            match op {
                BinOp::Add => x.into_iter().chain(y).collect(),
                BinOp::Sub => x
                    .into_iter()
                    .chain(y.into_iter().map(|t| ImageTerm {
                        num: t.num.scale(&LcComplex::constant(Complex64::new(-1.0, 0.0), ctx)),
                        ..t
                    }))
                    .collect(),
                BinOp::Mul => image_terms_mul(&x, &y),
                BinOp::Div => {
                    let inv = invert_terms(&y, ctx)?;
                    image_terms_mul(&x, &inv)
                }
            }
        }
        Expr::Pow(a, p) => {
            let n = p
                .to_i64()
                .ok_or_else(|| Error::Unsupported(format!("fractional power {p} in an image")))?;
            let base = image_terms(a, ctx)?;
            let base = if n < 0 { invert_terms(&base, ctx)? } else { base };
            let mut acc = constant(LcComplex::one(ctx));
            for _ in 0..n.unsigned_abs() {
                acc = image_terms_mul(&acc, &base);
            }
            acc
        }
        Expr::Call(Func::Exp, arg) => {
            let (a, b) = affine(arg, Symbol::Z, ctx)
                .ok_or_else(|| Error::Unsupported(format!("exp({arg}) is not of the form exp(-a*z + b)")))?;
            let shift = real_part(&-&a, "a shift")?;
            vec![ImageTerm {
                num: Poly::constant(exp_lc(&b)?),
                den: Poly::one(ctx),
                shift,
            }]
        }
        other => return unsupported(format!("{other} is not a rational function of z times exponentials")),
    })
}

fn invert_terms(t: &[ImageTerm], ctx: &TruncationContext) -> Result<Vec<ImageTerm>> {
    let merged = LaplaceImage::from_terms(t.to_vec(), ctx)?;
    match merged.terms.as_slice() {
        [single] => Ok(vec![ImageTerm {
            num: single.den.clone(),
            den: single.num.clone(),
            shift: -&single.shift,
        }]),
        _ => unsupported("division by a sum of terms with different shifts"),
    }
}

/// Evaluates an expression in `z` to a Laplace image.
pub fn eval_image(e: &Expr, ctx: &TruncationContext) -> Result<LaplaceImage> {
    if e.mentions(Symbol::T) || (0..3).any(|k| e.mentions(Symbol::Y(k))) {
        return Err(Error::Domain("an image is an expression in z".into()));
    }
    if !e.mentions(Symbol::Z) && e.mentions(Symbol::S) {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "s is the fixed infinitesimal scale; the transform variable is z".into(),
        });
    }
    LaplaceImage::from_terms(image_terms(e, ctx)?, ctx)
}

/// LC sample points around the real points and singular centers used by exact comparisons.
pub fn probe_points(ctx: &TruncationContext) -> Vec<LcReal> {
    let s = LcReal::scale(ctx);
    let mut out = Vec::new();
    for x in [-1.5, -0.5, 0.0, 0.5, 1.5, 2.5] {
        let base = LcReal::constant(x, ctx);
        for k in [0.0, -0.5, 0.5, 2.0] {
            out.push(&base + &s.scale_by(k));
        }
    }
    out
}
