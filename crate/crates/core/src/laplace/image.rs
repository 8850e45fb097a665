use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Algebra, FTerm, GenFunction};
use crate::lc::{eval_taylor, exp_lc, taylor_depth, LcComplex, LcReal, TruncationContext};
use crate::smooth::{binomial, falling, Jet};

use super::classical::{ClassicalFn, DomainElement, Oscillation};
use super::poly::Poly;
use super::roots::{roots, Root};

const CANCEL_TOL: f64 = 1e-10;

/// `num(z)/den(z) * e^(-shift z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageTerm {
    pub num: Poly,
    pub den: Poly,
    pub shift: LcReal,
}

/// A finite sum of rational functions times exponential shifts, valid on the
/// half-plane `Re z > half_plane`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceImage {
    pub terms: Vec<ImageTerm>,
    pub half_plane: f64,
    #[serde(skip)]
    ctx: TruncationContext,
}

fn same_shift(a: &LcReal, b: &LcReal) -> bool {
    a.approx_eq(b, 1e-14)
}

/// Cancels roots shared by numerator and denominator and makes the
/// denominator monic.
fn reduce_fraction(num: &Poly, den: &Poly) -> Result<(Poly, Poly)> {
    let ctx = num.ctx().clone();
    let lead = den.coeff(den.degree().ok_or(Error::DivisionByZero)?);
    let inv = lead.invert()?;
    let mut num = num.scale(&inv);
    let mut den = den.scale(&inv);
    if num.is_zero() {
        return Ok((num, Poly::one(&ctx)));
    }
    if den.degree() == Some(0) || !den.is_standard() {
        return Ok((num, den));
    }
    for root in roots(&den.standard()?)? {
        let factor = Poly::linear_factor(root.value, &ctx);
        for _ in 0..root.multiplicity {
            let scale = num.max_abs_coefficient() * root.value.norm().max(1.0).powi(num.degree().unwrap_or(0) as i32);
            if num.degree().unwrap_or(0) == 0 || num.eval(&LcComplex::constant(root.value, &ctx)).max_abs_coefficient() > CANCEL_TOL * scale {
                break;
            }
            num = num.div_rem(&factor)?.0.chop_relative(1e-14);
            den = den.div_rem(&factor)?.0.chop_relative(1e-14);
        }
    }
    Ok((num, den))
}

fn add_fractions(a: (&Poly, &Poly), b: (&Poly, &Poly)) -> (Poly, Poly) {
    if a.1.approx_eq(b.1, 1e-14) {
        (a.0.add(b.0), a.1.clone())
    } else {
        (a.0.mul(b.1).add(&b.0.mul(a.1)), a.1.mul(b.1))
    }
}

fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0)
}

/// `Π (z - ρ)^m`; conjugate pairs are multiplied out as real quadratics.
fn from_roots(rs: &[Root], ctx: &TruncationContext) -> Poly {
    let mut p = Poly::one(ctx);
    let mut used = vec![false; rs.len()];
    for i in 0..rs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = rs[i];
        let partner = if r.value.im == 0.0 {
            None
        } else {
            (0..rs.len()).find(|&j| !used[j] && rs[j].value == r.value.conj() && rs[j].multiplicity == r.multiplicity)
        };
        let factor = match partner {
            Some(j) => {
                used[j] = true;
                Poly::from_real(&[r.value.norm_sqr(), -2.0 * r.value.re, 1.0], ctx)
            }
            None => Poly::linear_factor(r.value, ctx),
        };
        p = p.mul(&factor.pow(r.multiplicity));
    }
    p
}

/// `Σ n_i/d_i` as one reduced fraction with a monic denominator. Standard
/// denominators are kept factored, so the common denominator is the exact
/// least common multiple rather than a product to be reduced numerically.
fn combine(parts: &[(Poly, Poly)], ctx: &TruncationContext) -> Result<(Poly, Poly)> {
    let parts: Vec<&(Poly, Poly)> = parts.iter().filter(|(n, _)| !n.is_zero()).collect();
    if parts.is_empty() {
        return Ok((Poly::zero(ctx), Poly::one(ctx)));
    }
    if parts.iter().any(|(_, d)| !d.is_standard()) {
        let (n, d) = parts
            .iter()
            .fold((Poly::zero(ctx), Poly::one(ctx)), |acc, (n, d)| add_fractions((&acc.0, &acc.1), (n, d)));
        return reduce_fraction(&n, &d);
    }
    let mut lcm: Vec<Root> = Vec::new();
    let mut pieces = Vec::new();
    for (n, d) in parts {
        let deg = d.degree().ok_or(Error::DivisionByZero)?;
        let n = n.scale(&d.coeff(deg).invert()?);
        let rs = if deg == 0 { Vec::new() } else { roots(&d.standard()?)? };
        for r in &rs {
            match lcm.iter_mut().find(|l| same_root(l.value, r.value)) {
                Some(l) => l.multiplicity = l.multiplicity.max(r.multiplicity),
                None => lcm.push(*r),
            }
        }
        pieces.push((n, rs));
    }
    let mut num = Poly::zero(ctx);
    let mut size: f64 = 0.0;
    for (n, rs) in pieces {
        let missing: Vec<Root> = lcm
            .iter()
            .filter_map(|l| {
                let have = rs.iter().find(|r| same_root(r.value, l.value)).map_or(0, |r| r.multiplicity);
                (l.multiplicity > have).then_some(Root {
                    value: l.value,
                    multiplicity: l.multiplicity - have,
                })
            })
            .collect();
        let part = n.mul(&from_roots(&missing, ctx));
        size = size.max(part.max_abs_coefficient());
        num = num.add(&part);
    }
    // what survives a cancelling sum at rounding level is noise
    let mut num = Poly::new(
        num.coeffs().iter().map(|c| c.chop(1e-13 * size)).collect(),
        ctx,
    );
    if num.is_zero() {
        return Ok((num, Poly::one(ctx)));
    }
    for l in lcm.iter_mut() {
        let at = LcComplex::constant(l.value, ctx);
        while l.multiplicity > 0 && num.degree().unwrap_or(0) > 0 {
            let scale = num.max_abs_coefficient() * l.value.norm().max(1.0).powi(num.degree().unwrap_or(0) as i32);
            if num.eval(&at).max_abs_coefficient() > CANCEL_TOL * scale {
                break;
            }
            num = num.div_rem(&Poly::linear_factor(l.value, ctx))?.0.chop_relative(1e-14);
            l.multiplicity -= 1;
        }
    }
    lcm.retain(|l| l.multiplicity > 0);
    Ok((num, from_roots(&lcm, ctx)))
}

fn poles_abscissa(terms: &[ImageTerm]) -> f64 {
    let mut lambda = f64::NEG_INFINITY;
    for t in terms {
        if let Ok(std) = t.den.standard() {
            if let Ok(rs) = roots(&std) {
                for r in rs {
                    lambda = lambda.max(r.value.re);
                }
            }
        }
    }
    lambda
}

impl LaplaceImage {
    pub fn zero(ctx: &TruncationContext) -> Self {
        LaplaceImage {
            terms: Vec::new(),
            half_plane: f64::NEG_INFINITY,
            ctx: ctx.clone(),
        }
    }

    /// Builds an image from raw terms, merging equal shifts and cancelling
    /// common factors.
    pub fn from_terms(terms: Vec<ImageTerm>, ctx: &TruncationContext) -> Result<Self> {
        let mut groups: Vec<(LcReal, Vec<(Poly, Poly)>)> = Vec::new();
        for t in terms {
            if t.num.is_zero() {
                continue;
            }
            let shift = t.shift.with_context(ctx);
            match groups.iter_mut().find(|g| same_shift(&g.0, &shift)) {
                Some(g) => g.1.push((t.num, t.den)),
                None => groups.push((shift, vec![(t.num, t.den)])),
            }
        }
        let mut out = Vec::new();
        for (shift, parts) in groups {
            let (num, den) = combine(&parts, ctx)?;
            if num.is_zero() || num.max_abs_coefficient() == 0.0 {
                continue;
            }
            out.push(ImageTerm { num, den, shift });
        }
        out.sort_by(|a, b| {
            a.shift
                .compare(&b.shift)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let half_plane = poles_abscissa(&out);
        Ok(LaplaceImage {
            terms: out,
            half_plane,
            ctx: ctx.clone(),
        })
    }

    pub fn single(num: Poly, den: Poly, shift: LcReal) -> Result<Self> {
        let ctx = num.ctx().clone();
        Self::from_terms(vec![ImageTerm { num, den, shift }], &ctx)
    }

    pub fn ctx(&self) -> &TruncationContext {
        &self.ctx
    }

    pub fn add(&self, other: &LaplaceImage) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms, &self.ctx)
    }

    pub fn scale(&self, c: &LcComplex) -> Result<Self> {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| ImageTerm {
                    num: t.num.scale(c),
                    ..t.clone()
                })
                .collect(),
            &self.ctx,
        )
    }

    /// Multiplies every term by `p(z)/q(z)`.
    pub fn times_rational(&self, p: &Poly, q: &Poly) -> Result<Self> {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| ImageTerm {
                    num: t.num.mul(p),
                    den: t.den.mul(q),
                    shift: t.shift.clone(),
                })
                .collect(),
            &self.ctx,
        )
    }

    /// Value at a finite LC point `z`.
    pub fn eval(&self, z: &LcComplex) -> Result<LcComplex> {
        let z = z.with_context(&self.ctx);
        let mut total = LcComplex::zero(&self.ctx);
        for t in &self.terms {
            let ratio = t.num.eval(&z).checked_div(&t.den.eval(&z))?;
            let e = exp_lc(&-&LcComplex::from_real(t.shift.clone()).checked_mul(&z)?)?;
            total = &total + &(&ratio * &e);
        }
        Ok(total)
    }

    /// Term-level equality: per shift, `N1 D2 - N2 D1` vanishes.
    pub fn equals(&self, other: &LaplaceImage) -> bool {
        let mut shifts: Vec<LcReal> = Vec::new();
        for t in self.terms.iter().chain(&other.terms) {
            if !shifts.iter().any(|s| same_shift(s, &t.shift)) {
                shifts.push(t.shift.clone());
            }
        }
        let collect = |img: &LaplaceImage, shift: &LcReal| {
            let parts: Vec<(Poly, Poly)> = img
                .terms
                .iter()
                .filter(|t| same_shift(&t.shift, shift))
                .map(|t| (t.num.clone(), t.den.clone()))
                .collect();
            combine(&parts, &self.ctx).ok()
        };
        shifts.iter().all(|shift| {
            let (Some((n1, d1)), Some((n2, d2))) = (collect(self, shift), collect(other, shift)) else {
                return false;
            };
            let (a, b) = (n1.mul(&d2), n2.mul(&d1));
            let scale = a.max_abs_coefficient().max(b.max_abs_coefficient()).max(1.0);
            a.approx_eq(&b, 1e-10 * scale)
        })
    }
}

impl fmt::Display for LaplaceImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let num = t.num.to_string();
            let den = t.den.to_string();
            let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
            let mut body = if den == "1" { num.clone() } else { format!("{}/{}", wrap(num.clone()), wrap(den.clone())) };
            if !t.shift.is_zero() {
                let shift = t.shift.to_string();
                let shift = if shift.contains(' ') { format!("({shift})") } else { shift };
                let e = format!("e^(-{shift}*z)");
                body = match (num.as_str(), den.as_str()) {
                    ("1", "1") => e,
                    (_, "1") => format!("{}*{e}", wrap(num)),
                    _ => format!("{body}*{e}"),
                };
            }
            match body.strip_prefix('-') {
                Some(rest) if i > 0 => write!(f, " - {rest}")?,
                _ if i > 0 => write!(f, " + {body}")?,
                _ => write!(f, "{body}")?,
            }
        }
        Ok(())
    }
}

/// Checks that `ψ` lies in the transform's domain: compact external support
/// in `[0, ∞)` and internal support above `s`.
pub fn check_membership(psi: &GenFunction) -> Result<()> {
    let info = psi.support()?;
    let s = psi.algebra().s();
    for piece in &info.internal {
        let ok = piece.lo.as_ref().is_some_and(|lo| (lo - &s).signum() >= 0);
        if !ok {
            return Err(Error::DomainMembership(format!(
                "internal support {piece} of {psi} is not contained in [s, ∞)"
            )));
        }
    }
    if !info.is_compact() {
        return Err(Error::DomainMembership(format!(
            "external support of {psi} is not compact"
        )));
    }
    Ok(())
}

/// `∫ ψ(t) e^{-zt} dt` as an image, read off the normal form of `ψ`.
pub fn transform_generalized(psi: &GenFunction) -> Result<LaplaceImage> {
    check_membership(psi)?;
    let ctx = psi.algebra().ctx().clone();
    let functional = psi.functional()?;
    let mut terms = Vec::new();
    for term in functional.terms() {
        match term {
            FTerm::Point {
                loc,
                order,
                coeff,
                g,
                ..
            } => {
                let m = *order;
                let c0 = loc.standard_part()?;
                let h = LcComplex::from_real(loc.infinitesimal_part()?);
                let depth = taylor_depth(&h);
                let gt = g.taylor(c0, m + depth)?;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                // (g e^{-zt})^(m)(L) = Σ_i C(m,i) g^(m-i)(L) (-z)^i e^{-Lz}
                let coeffs: Vec<LcComplex> = (0..=m)
                    .map(|i| {
                        let r = m - i;
                        let lifted: Vec<Complex64> = (0..=depth)
                            .map(|j| gt[r + j] * falling(r + j, r))
                            .collect();
                        let zsign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        (coeff * &eval_taylor(&lifted, &h))
                            .scale_real(sign * zsign * binomial(m, i))
                            .with_context(&ctx)
                    })
                    .collect();
                terms.push(ImageTerm {
                    num: Poly::new(coeffs, &ctx),
                    den: Poly::one(&ctx),
                    shift: loc.with_context(&ctx),
                });
            }
            FTerm::HalfLine { loc, coeff, g } => {
                let c0 = loc.standard_part()?;
                let a = g.taylor(c0, 2)?;
                let b = g.taylor(c0 + 1.0, 0)?;
                if a[1].norm() > 0.0 || a[2].norm() > 0.0 || (a[0] - b[0]).norm() > 0.0 {
                    return Err(Error::Unsupported(format!(
                        "half-line part of {psi} with a non-constant factor"
                    )));
                }
                terms.push(ImageTerm {
                    num: Poly::constant(coeff.scale_by(a[0]).with_context(&ctx)),
                    den: Poly::from_real(&[0.0, 1.0], &ctx),
                    shift: loc.with_context(&ctx),
                });
            }
            FTerm::Whole { .. } => {
                return Err(Error::DomainMembership(format!(
                    "{psi} has a part that is not compactly supported"
                )))
            }
        }
    }
    LaplaceImage::from_terms(terms, &ctx)
}

/// The classical table entry, delay included.
pub fn transform_classical(f: &ClassicalFn, ctx: &TruncationContext) -> Result<LaplaceImage> {
    let (num, den) = f.image(ctx);
    let shift = f.delay.clone().unwrap_or_else(|| LcReal::zero(ctx));
    if shift.signum() < 0 {
        return Err(Error::DomainMembership(format!("negative delay in {f}")));
    }
    LaplaceImage::single(num, den, shift)
}

/// `L̂(f)` by linearity over classical and generalized parts.
pub fn transform(f: &DomainElement, ctx: &TruncationContext) -> Result<LaplaceImage> {
    let mut acc = LaplaceImage::zero(ctx);
    for (c, g) in &f.classical {
        acc = acc.add(&transform_classical(g, ctx)?.scale(c)?)?;
    }
    for (c, psi) in &f.generalized {
        acc = acc.add(&transform_generalized(psi)?.scale(c)?)?;
    }
    Ok(acc)
}

/// `z^n e^{-2sz}`, the image of `δ^(n)(t - 2s)`.
pub fn transform_derivative_shifted(n: usize, ctx: &TruncationContext) -> LaplaceImage {
    let shift = LcReal::scale(ctx).scale_by(2.0);
    LaplaceImage::single(Poly::monomial(n, LcComplex::one(ctx)), Poly::one(ctx), shift)
        .expect("monomial image")
}

/// Partial-fraction coefficients `A_j` of `num/den` at `root`, so that the
/// principal part is `Σ_j A_j/(z - ρ)^j`.
fn principal_part(num: &Poly, den_std: &[Complex64], all: &[Root], root: &Root) -> Result<Vec<LcComplex>> {
    let m = root.multiplicity;
    let lead = *den_std.last().expect("nonzero denominator");
    // q(z) = den / (z - ρ)^m as a jet at ρ
    let mut q = Jet::constant(lead, m);
    for other in all.iter().filter(|r| r.value != root.value) {
        let lin = &Jet::variable(root.value, m) - &Jet::constant(other.value, m);
        q = &q * &lin.powi(other.multiplicity as u32);
    }
    let inv = q.recip()?;
    let r = num.taylor_at(root.value);
    let ctx = num.ctx();
    let g: Vec<LcComplex> = (0..m)
        .map(|k| {
            (0..=k).fold(LcComplex::zero(ctx), |acc, i| {
                let ri = r.get(i).cloned().unwrap_or_else(|| LcComplex::zero(ctx));
                &acc + &ri.scale_by(inv.coeffs()[k - i])
            })
        })
        .collect();
    Ok((1..=m).map(|j| g[m - j].clone()).collect())
}

fn push_part(out: &mut DomainElement, c: LcComplex, f: ClassicalFn) {
    let c = c.chop(1e-13 * c.max_abs_coefficient().max(1.0));
    if c.is_zero() {
        return;
    }
    match out.classical.iter_mut().find(|(_, g)| *g == f) {
        Some((acc, _)) => *acc = &*acc + &c,
        None => out.classical.push((c, f)),
    }
}

/// `L̂⁻¹`: polynomial parts become derivatives of deltas, proper parts are
/// split into partial fractions over `Ĉ`, and shifts become delays.
pub fn inverse_transform(img: &LaplaceImage, alg: &Algebra) -> Result<DomainElement> {
    let ctx = img.ctx();
    let mut out = DomainElement::default();
    for term in &img.terms {
        if term.shift.signum() < 0 {
            return Err(Error::Unsupported(format!("negative shift {}", term.shift)));
        }
        if !term.den.is_standard() {
            return Err(Error::Unsupported(format!(
                "denominator {} has non-standard coefficients",
                term.den
            )));
        }
        let (quot, rem) = term.num.div_rem(&term.den)?;
        for (k, c) in quot.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let delta = alg.delta(0.0, k).translate(&term.shift)?;
            out.generalized.push((c.clone(), delta));
        }
        if rem.is_zero() {
            continue;
        }
        let den_std = term.den.standard()?;
        let rs = roots(&den_std)?;
        let delay = |f: ClassicalFn| f.delayed(term.shift.clone());
        for root in &rs {
            let (alpha, omega) = (root.value.re, root.value.im);
            let parts = principal_part(&rem, &den_std, &rs, root)?;
            let partner = rs
                .iter()
                .find(|r| r.value == root.value.conj() && r.multiplicity == root.multiplicity);
            if omega < 0.0 && partner.is_some() {
                continue;
            }
            let partner_parts = match partner {
                Some(p) if omega > 0.0 => Some(principal_part(&rem, &den_std, &rs, p)?),
                _ => None,
            };
            for (j, a) in parts.iter().enumerate() {
                let fact = crate::smooth::factorial(j);
                let a = a.scale_real(1.0 / fact);
                let power = j as u32;
                if omega == 0.0 {
                    push_part(&mut out, a, delay(ClassicalFn::exp_poly(power, alpha)));
                    continue;
                }
                let i = LcComplex::i(ctx);
                let (cos_c, sin_c) = match &partner_parts {
                    Some(pp) => {
                        let b = pp[j].scale_real(1.0 / fact);
                        (&a + &b, &i * &(&a - &b))
                    }
                    None => (a.clone(), &i * &a),
                };
                push_part(
                    &mut out,
                    cos_c,
                    delay(ClassicalFn::cos(omega).with_exp(alpha).with_power(power)),
                );
                push_part(
                    &mut out,
                    sin_c,
                    delay(ClassicalFn::sin(omega).with_exp(alpha).with_power(power)),
                );
            }
        }
    }
    out.classical
        .sort_by_key(|(_, f)| (f.delay.is_some(), f.osc == Oscillation::Cos));
    Ok(out)
}
