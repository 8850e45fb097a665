//! Expansion into monomials, reduction of singular products, and the pairing
//! functional in normal form.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;

use super::atom::{Singular, SingularKind, SmoothAtom, StdFactor};
use super::testfn::Weight;
use super::{GenFunction, Node};
use crate::error::{Error, Result};
use crate::lc::{eval_taylor, taylor_depth, Exponent, LcComplex, LcReal, TruncationContext, Valuation};
use crate::mollifier::Mollifier;
use crate::quad::QuadratureScheme;
use crate::smooth::{binomial, factorial, falling, Jet};

const SYMBOLIC_TOL: f64 = 1e-12;
const NUMERIC_TOL: f64 = 1e-8;

/// `coeff * Π smooth * Π singular`.
#[derive(Clone, Debug)]
pub(crate) struct Monomial {
    pub coeff: LcComplex,
    pub smooth: Vec<SmoothAtom>,
    pub singular: Vec<Singular>,
}

pub(crate) fn expand(node: &Node, ctx: &TruncationContext) -> Vec<Monomial> {
    let unit = |coeff: LcComplex| Monomial {
        coeff,
        smooth: Vec::new(),
        singular: Vec::new(),
    };
    let out = match node {
        Node::Zero => Vec::new(),
        Node::Smooth(a) => match a.as_constant() {
            Some(c) => vec![unit(LcComplex::constant(c, ctx))],
            None => vec![Monomial {
                smooth: vec![a.clone()],
                ..unit(LcComplex::one(ctx))
            }],
        },
        Node::Singular(s) => vec![Monomial {
            singular: vec![s.clone()],
            ..unit(LcComplex::one(ctx))
        }],
        Node::Sum(v) => v.iter().flat_map(|n| expand(n, ctx)).collect(),
        Node::Product(v) => {
            let mut acc = vec![unit(LcComplex::one(ctx))];
            for n in v {
                let right = expand(n, ctx);
                let mut next = Vec::with_capacity(acc.len() * right.len());
                for a in &acc {
                    for b in &right {
                        next.push(Monomial {
                            coeff: &a.coeff * &b.coeff,
                            smooth: a.smooth.iter().chain(&b.smooth).cloned().collect(),
                            singular: a.singular.iter().chain(&b.singular).cloned().collect(),
                        });
                    }
                }
                acc = next;
            }
            acc
        }
        Node::Scale(c, n) => expand(n, ctx)
            .into_iter()
            .map(|m| Monomial {
                coeff: &m.coeff * c,
                ..m
            })
            .collect(),
    };
    out.into_iter().filter(|m| !m.coeff.is_zero()).collect()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct ClusterAtom {
    pub kind: SingularKind,
    pub eta: f64,
    pub width: f64,
}

/// The singular part of a monomial after products of separated atoms have
/// been resolved.
#[derive(Clone, Debug)]
pub(crate) enum Reduced {
    Zero,
    Plain,
    Point { loc: LcReal, order: usize, width: f64 },
    Half { loc: LcReal, width: f64 },
    /// Atoms at `reference + eta * s`, all within `O(s)` of each other.
    Cluster {
        reference: LcReal,
        atoms: Vec<ClusterAtom>,
        has_delta: bool,
    },
}

impl Reduced {
    /// Total singular order `Σ (1 + k)` over delta atoms.
    pub fn sigma(&self) -> usize {
        match self {
            Reduced::Point { order, .. } => order + 1,
            Reduced::Cluster { atoms, .. } => atoms
                .iter()
                .filter_map(|a| match a.kind {
                    SingularKind::Delta(k) => Some(k + 1),
                    SingularKind::Heaviside => None,
                })
                .sum(),
            _ => 0,
        }
    }
}

fn close(d: &LcReal) -> bool {
    match d.valuation() {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= Exponent::one(),
    }
}

fn eta(d: &LcReal) -> Result<f64> {
    let one = Exponent::one();
    match d.terms() {
        [] => Ok(0.0),
        [(e, c)] if *e == one => Ok(*c),
        _ => Err(Error::Unsupported(format!(
            "singular atoms offset by {d}, which is not a real multiple of s"
        ))),
    }
}

pub(crate) fn reduce(singular: &[Singular]) -> Result<Reduced> {
    if singular.is_empty() {
        return Ok(Reduced::Plain);
    }
    let (deltas, heavis): (Vec<&Singular>, Vec<&Singular>) =
        singular.iter().partition(|s| s.delta_order().is_some());

    if let Some(first) = deltas.first() {
        let r = first.location();
        let mut atoms = Vec::new();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for d in &deltas {
            let off = &d.location() - &r;
            if !close(&off) {
                return Ok(Reduced::Zero);
            }
            let e = eta(&off)?;
            lo = lo.max(e - d.width);
            hi = hi.min(e + d.width);
            atoms.push(ClusterAtom {
                kind: d.kind,
                eta: e,
                width: d.width,
            });
        }
        if lo >= hi {
            return Ok(Reduced::Zero);
        }
        for h in &heavis {
            let off = &h.location() - &r;
            if !close(&off) {
                if off.signum() < 0 {
                    continue;
                }
                return Ok(Reduced::Zero);
            }
            let e = eta(&off)?;
            if e + h.width <= lo {
                continue;
            }
            if e - h.width >= hi {
                return Ok(Reduced::Zero);
            }
            atoms.push(ClusterAtom {
                kind: h.kind,
                eta: e,
                width: h.width,
            });
        }
        return Ok(if atoms.len() == 1 {
            Reduced::Point {
                loc: r,
                order: first.delta_order().unwrap_or(0),
                width: first.width,
            }
        } else {
            Reduced::Cluster {
                reference: r,
                atoms,
                has_delta: true,
            }
        });
    }

    let mut latest = heavis[0];
    for h in &heavis[1..] {
        if h.location().compare(&latest.location())? == Ordering::Greater {
            latest = h;
        }
    }
    let r = latest.location();
    let mut atoms = Vec::new();
    for h in &heavis {
        let off = &h.location() - &r;
        if !close(&off) {
            continue;
        }
        let e = eta(&off)?;
        if e + h.width <= -latest.width {
            continue;
        }
        atoms.push(ClusterAtom {
            kind: h.kind,
            eta: e,
            width: h.width,
        });
    }
    Ok(if atoms.len() == 1 {
        Reduced::Half {
            loc: r,
            width: latest.width,
        }
    } else {
        Reduced::Cluster {
            reference: r,
            atoms,
            has_delta: false,
        }
    })
}

/// A product of standard smooth factors.
#[derive(Clone, Debug, Default)]
pub(crate) struct StdProduct(Vec<StdFactor>);

impl StdProduct {
    pub fn taylor(&self, at: f64, order: usize) -> Result<Vec<Complex64>> {
        let x = Complex64::new(at, 0.0);
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0), order);
        for f in &self.0 {
            acc = &acc * &Jet::from_coeffs(f.taylor(x, order)?);
        }
        Ok(acc.into_coeffs())
    }

    pub fn value(&self, x: f64) -> Result<Complex64> {
        let z = Complex64::new(x, 0.0);
        self.0
            .iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, f| Ok(acc * f.value(z)?))
    }
}

/// Distributes `coeff * Π atoms` over the standardized expansion of each atom.
fn standardize(
    coeff: &LcComplex,
    atoms: &[SmoothAtom],
    wide: &TruncationContext,
) -> Result<Vec<(LcComplex, StdProduct)>> {
    let mut acc = vec![(coeff.with_context(wide), StdProduct::default())];
    for a in atoms {
        let parts = a.standardize(wide)?;
        let mut next = Vec::with_capacity(acc.len() * parts.len());
        for (c, g) in &acc {
            for (d, f) in &parts {
                let prod = c * d;
                if prod.is_zero() {
                    continue;
                }
                let mut factors = g.0.clone();
                factors.push(f.clone());
                next.push((prod, StdProduct(factors)));
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub(crate) enum FTerm {
    /// `coeff * (-1)^order (g τ)^(order)(loc)`.
    Point {
        loc: LcReal,
        order: usize,
        coeff: LcComplex,
        g: StdProduct,
        numeric: bool,
    },
    /// `coeff * ∫_loc^∞ g τ`.
    HalfLine {
        loc: LcReal,
        coeff: LcComplex,
        g: StdProduct,
    },
    /// `coeff * ∫ g τ`.
    Whole { coeff: LcComplex, g: StdProduct },
}

/// The linear functional `τ ↦ (f | τ)` as a finite sum of point evaluations
/// of derivatives and integrals against smooth densities.
#[derive(Clone, Debug)]
pub struct Functional {
    ctx: TruncationContext,
    terms: Vec<FTerm>,
    scheme: QuadratureScheme,
    domain: (f64, f64),
}

/// `∫ u^n K(u) du` for `n = 0..=n_max` over `[a, b]`, split at `cuts`.
fn moments(
    kernel: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cuts: &[f64],
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<Vec<f64>> {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    pts.push(b);
    (0..=n_max)
        .map(|n| {
            let mut total = 0.0;
            for w in pts.windows(2) {
                total += scheme.integrate(|u| u.powi(n as i32) * kernel(u), w[0], w[1])?;
            }
            Ok(total)
        })
        .collect()
}

fn cluster_terms(
    phi: &Mollifier,
    scheme: &QuadratureScheme,
    reference: &LcReal,
    atoms: &[ClusterAtom],
    has_delta: bool,
    parts: &[(LcComplex, StdProduct)],
    wide: &TruncationContext,
    out: &mut Vec<FTerm>,
) -> Result<()> {
    let kernel = |u: f64| {
        atoms.iter().fold(1.0, |acc, a| {
            let y = (u - a.eta) / a.width;
            acc * match a.kind {
                SingularKind::Delta(k) => phi.derivative(k, y),
                SingularKind::Heaviside => phi.cumulative(y),
            }
        })
    };
    let mut prefactor = 1.0;
    let mut sigma = 0i64;
    for a in atoms {
        if let SingularKind::Delta(k) = a.kind {
            prefactor *= a.width.powi(-1 - k as i32);
            sigma += 1 + k as i64;
        }
    }
    let lead = if has_delta { 1 - sigma } else { 1 };
    let room = (&wide.q_max - &Exponent::integer(lead)).to_f64().floor();
    if room < 0.0 {
        return Ok(());
    }
    let n_max = room as usize;
    let lo = atoms.iter().map(|a| a.eta - a.width);
    let hi = atoms.iter().map(|a| a.eta + a.width);
    let loc = reference.with_context(wide);
    let ints = if has_delta {
        let a = atoms
            .iter()
            .filter(|a| a.kind != SingularKind::Heaviside)
            .map(|a| a.eta - a.width)
            .fold(f64::NEG_INFINITY, f64::max);
        let b = atoms
            .iter()
            .filter(|a| a.kind != SingularKind::Heaviside)
            .map(|a| a.eta + a.width)
            .fold(f64::INFINITY, f64::min);
        let cuts: Vec<f64> = atoms.iter().flat_map(|a| [a.eta - a.width, a.eta + a.width]).collect();
        moments(&kernel, a, b, &cuts, n_max, scheme)?
    } else {
        let a = lo.fold(0.0, f64::min);
        let b = hi.fold(0.0, f64::max);
        let rest = |u: f64| kernel(u) - if u > 0.0 { 1.0 } else { 0.0 };
        let cuts: Vec<f64> = std::iter::once(0.0)
            .chain(atoms.iter().flat_map(|a| [a.eta - a.width, a.eta + a.width]))
            .collect();
        moments(&rest, a, b, &cuts, n_max, scheme)?
    };
    for (c, g) in parts {
        if !has_delta {
            out.push(FTerm::HalfLine {
                loc: loc.clone(),
                coeff: c.clone(),
                g: g.clone(),
            });
        }
        for (n, i_n) in ints.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let scalar = prefactor * i_n * sign / factorial(n);
            let mono = LcComplex::monomial(
                Exponent::integer(lead + n as i64),
                Complex64::new(scalar, 0.0),
                wide,
            );
            out.push(FTerm::Point {
                loc: loc.clone(),
                order: n,
                coeff: c * &mono,
                g: g.clone(),
                numeric: true,
            });
        }
    }
    Ok(())
}

pub(crate) fn build(f: &GenFunction) -> Result<Functional> {
    let alg = f.algebra();
    let ctx = alg.ctx();
    let mut terms = Vec::new();
    for mono in expand(f.node(), ctx) {
        let reduced = reduce(&mono.singular)?;
        if matches!(reduced, Reduced::Zero) {
            continue;
        }
        let extra = reduced.sigma().saturating_sub(1) as i64;
        let wide = ctx.widened(&Exponent::integer(extra));
        let parts = standardize(&mono.coeff, &mono.smooth, &wide)?;
        match &reduced {
            Reduced::Zero => {}
            Reduced::Plain => {
                for (coeff, g) in parts {
                    terms.push(FTerm::Whole { coeff, g });
                }
            }
            Reduced::Point { loc, order, .. } => {
                for (coeff, g) in parts {
                    terms.push(FTerm::Point {
                        loc: loc.with_context(&wide),
                        order: *order,
                        coeff,
                        g,
                        numeric: false,
                    });
                }
            }
            Reduced::Half { loc, .. } => {
                for (coeff, g) in parts {
                    terms.push(FTerm::HalfLine {
                        loc: loc.with_context(&wide),
                        coeff,
                        g,
                    });
                }
            }
            Reduced::Cluster {
                reference,
                atoms,
                has_delta,
            } => cluster_terms(
                alg.mollifier(),
                &alg.settings().quad,
                reference,
                atoms,
                *has_delta,
                &parts,
                &wide,
                &mut terms,
            )?,
        }
    }
    Ok(Functional {
        ctx: ctx.clone(),
        terms,
        scheme: alg.settings().quad,
        domain: alg.domain(),
    })
}

fn split_loc(loc: &LcReal) -> Result<(f64, LcComplex)> {
    Ok((loc.standard_part()?, LcComplex::from_real(loc.infinitesimal_part()?)))
}

impl Functional {
    pub fn ctx(&self) -> &TruncationContext {
        &self.ctx
    }

    pub(crate) fn terms(&self) -> &[FTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True when some coefficient came from moment quadrature rather than a
    /// symbolic rule.
    pub fn has_numeric_terms(&self) -> bool {
        self.terms
            .iter()
            .any(|t| matches!(t, FTerm::Point { numeric: true, .. }))
    }

    fn integrate_complex(&self, f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Result<Complex64> {
        let a = a.max(self.domain.0);
        let b = b.min(self.domain.1);
        if a >= b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let re = self.scheme.integrate(|x| f(x).re, a, b)?;
        let im = self.scheme.integrate(|x| f(x).im, a, b)?;
        let v = Complex64::new(re, im);
        if !v.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
        }
        Ok(v)
    }

    fn density_integral(&self, g: &StdProduct, tau: &dyn Weight, a: f64, b: f64) -> Result<Complex64> {
        self.integrate_complex(
            |x| match g.value(x) {
                Ok(v) => v * tau.value(x),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            },
            a,
            b,
        )
    }

    fn product_taylor(g: &StdProduct, tau: &dyn Weight, at: f64, order: usize) -> Result<Vec<Complex64>> {
        let gj = Jet::from_coeffs(g.taylor(at, order)?);
        let tj = Jet::from_coeffs(tau.taylor(at, order));
        Ok((&gj * &tj).into_coeffs())
    }

    /// `(f | τ)`, truncated to the algebra's context.
    pub fn pair(&self, tau: &dyn Weight) -> Result<LcComplex> {
        let (slo, shi) = tau.support();
        let mut total = LcComplex::zero(&self.ctx);
        for term in &self.terms {
            let value = match term {
                FTerm::Point {
                    loc,
                    order,
                    coeff,
                    g,
                    ..
                } => {
                    let (c0, h) = split_loc(loc)?;
                    if !(slo < c0 && c0 < shi) {
                        continue;
                    }
                    let depth = taylor_depth(&h);
                    let t = Self::product_taylor(g, tau, c0, order + depth)?;
                    let d: Vec<Complex64> = (0..=depth)
                        .map(|j| t[order + j] * falling(order + j, *order))
                        .collect();
                    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                    coeff * &eval_taylor(&d, &h).scale_real(sign)
                }
                FTerm::HalfLine { loc, coeff, g } => {
                    let (c0, h) = split_loc(loc)?;
                    let integral = self.density_integral(g, tau, c0.max(slo), shi)?;
                    let mut v = LcComplex::constant(integral, coeff.ctx());
                    if slo < c0 && c0 < shi && !h.is_zero() {
                        let depth = taylor_depth(&h);
                        let t = Self::product_taylor(g, tau, c0, depth)?;
                        let mut e = vec![Complex64::new(0.0, 0.0); depth + 1];
                        for j in 1..=depth {
                            e[j] = t[j - 1] / j as f64;
                        }
                        v = &v - &eval_taylor(&e, &h);
                    }
                    coeff * &v
                }
                FTerm::Whole { coeff, g } => {
                    let integral = self.density_integral(g, tau, slo, shi)?;
                    coeff.scale_by(integral)
                }
            };
            total = &total + &value.with_context(&self.ctx);
        }
        Ok(total)
    }

    /// Decides `f ≅ 0` from the normal form: every coefficient of every
    /// `τ^(i)(c)` vanishes and the smooth density vanishes on `Ω`.
    pub fn is_weak_zero(&self) -> Result<bool> {
        struct Acc {
            value: LcComplex,
            scale: f64,
            numeric: bool,
        }
        let (dlo, dhi) = self.domain;
        let inside = |c: f64| dlo < c && c < dhi;
        let mut points: BTreeMap<(u64, usize), Acc> = BTreeMap::new();
        let mut add = |c0: f64, i: usize, v: LcComplex, numeric: bool| {
            let key = ((c0 + 0.0).to_bits(), i);
            let scale = v.max_abs_coefficient();
            let v = v.with_context(&self.ctx);
            let acc = points.entry(key).or_insert_with(|| Acc {
                value: LcComplex::zero(&self.ctx),
                scale: 0.0,
                numeric: false,
            });
            acc.value = &acc.value + &v;
            acc.scale = acc.scale.max(scale);
            acc.numeric |= numeric;
        };
        let mut densities: Vec<(Option<f64>, &LcComplex, &StdProduct)> = Vec::new();

        for term in &self.terms {
            match term {
                FTerm::Point {
                    loc,
                    order,
                    coeff,
                    g,
                    numeric,
                } => {
                    let (c0, h) = split_loc(loc)?;
                    if !inside(c0) {
                        continue;
                    }
                    let m = *order;
                    let depth = taylor_depth(&h);
                    let gt = g.taylor(c0, m + depth)?;
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    for i in 0..=m + depth {
                        let scalars: Vec<Complex64> = (0..=depth)
                            .map(|j| {
                                if m + j < i {
                                    return Complex64::new(0.0, 0.0);
                                }
                                let r = m + j - i;
                                gt[r] * (factorial(r) * binomial(m + j, i) * sign / factorial(j))
                            })
                            .collect();
                        add(c0, i, coeff * &eval_taylor(&scalars, &h), *numeric);
                    }
                }
                FTerm::HalfLine { loc, coeff, g } => {
                    let (c0, h) = split_loc(loc)?;
                    densities.push((Some(c0), coeff, g));
                    if !inside(c0) || h.is_zero() {
                        continue;
                    }
                    let depth = taylor_depth(&h);
                    let gt = g.taylor(c0, depth)?;
                    for i in 0..depth {
                        let mut scalars = vec![Complex64::new(0.0, 0.0); depth + 1];
                        for j in (i + 1)..=depth {
                            scalars[j] = -gt[j - 1 - i] / (factorial(i) * j as f64);
                        }
                        add(c0, i, coeff * &eval_taylor(&scalars, &h), false);
                    }
                }
                FTerm::Whole { coeff, g } => densities.push((None, coeff, g)),
            }
        }

        for acc in points.values() {
            let tol = if acc.numeric {
                NUMERIC_TOL
            } else {
                SYMBOLIC_TOL * acc.scale
            };
            if acc.value.max_abs_coefficient() > tol {
                return Ok(false);
            }
        }

        if densities.is_empty() {
            return Ok(true);
        }
        let mut breaks: Vec<f64> = densities
            .iter()
            .filter_map(|d| d.0)
            .filter(|c| inside(*c))
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let first = breaks.first().copied().unwrap_or(0.0);
        let last = breaks.last().copied().unwrap_or(0.0);
        let lo = if dlo.is_finite() { dlo } else { first.min(dhi) - 10.0 };
        let hi = if dhi.is_finite() { dhi } else { last.max(dlo) + 10.0 };
        let mut edges = vec![lo];
        edges.extend(breaks);
        edges.push(hi);
        for w in edges.windows(2) {
            for k in 0..7 {
                let x = w[0] + (w[1] - w[0]) * (k as f64 + 0.5) / 7.0;
                let mut sum = LcComplex::zero(&self.ctx);
                let mut scale: f64 = 0.0;
                for (start, coeff, g) in &densities {
                    if start.is_some_and(|c| x <= c) {
                        continue;
                    }
                    let gv = g.value(x)?;
                    let v = coeff.scale_by(gv).with_context(&self.ctx);
                    scale = scale.max(v.max_abs_coefficient());
                    sum = &sum + &v;
                }
                if sum.max_abs_coefficient() > SYMBOLIC_TOL * scale.max(f64::MIN_POSITIVE) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
