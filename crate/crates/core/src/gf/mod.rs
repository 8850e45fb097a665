//! Generalized functions on an open interval `Ω ⊆ ℝ`.
//!
//! A [`GenFunction`] is an expression tree over smooth atoms, delta atoms
//! (any derivative order) and Heaviside atoms, closed under sums, products,
//! LC scalar multiples, differentiation and translation by LC amounts. Every
//! singular atom is represented by the algebra's [`Mollifier`] rescaled to
//! width `s`, so products such as `δ²` or `H δ` are honest functions with
//! computable pairings.
//!
//! ```
//! use lcgf::gf::{Algebra, GfSettings};
//! use lcgf::lc::LcReal;
//!
//! let alg = Algebra::new(GfSettings::default()).unwrap();
//! let two_s = LcReal::scale(alg.ctx()).scale_by(2.0);
//! let shifted = alg.delta(0.0, 0).translate(&two_s).unwrap();
//! assert_eq!(shifted.integral_compact().unwrap().standard_part().unwrap().re, 1.0);
//! ```

mod atom;
mod normal;
mod relations;
mod support;
mod testfn;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

pub use atom::{OracleFn, Singular, SingularKind, SmoothAtom, SmoothKind};
pub(crate) use atom::signed_tail;
pub(crate) use normal::FTerm;
pub use normal::Functional;
pub use relations::Verdict;
pub use support::{ExternalPiece, InternalPiece, SupportInfo};
pub use testfn::{battery, TestFunction, Weight, Windowed};

use crate::error::{Error, Result};
use crate::lc::{LcComplex, LcReal, TruncationContext};
use crate::mollifier::Mollifier;
use crate::quad::QuadratureScheme;
use crate::smooth::SmoothExpr;

/// Numerical settings shared by every generalized function of one algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GfSettings {
    pub ctx: TruncationContext,
    pub moment_order: usize,
    pub quad: QuadratureScheme,
    pub battery_size: usize,
    pub seed: u64,
}

impl Default for GfSettings {
    fn default() -> Self {
        GfSettings {
            ctx: TruncationContext::default(),
            moment_order: 2,
            quad: QuadratureScheme::default(),
            battery_size: 32,
            seed: 0,
        }
    }
}

#[derive(Debug)]
struct AlgebraInner {
    settings: GfSettings,
    mollifier: Arc<Mollifier>,
    domain: (f64, f64),
}

/// Handle to one instance of the algebra: settings, the shared mollifier and
/// the domain `Ω = (lo, hi)`. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Algebra {
    inner: Arc<AlgebraInner>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.settings == other.inner.settings
                && self.inner.domain == other.inner.domain)
    }
}

impl Algebra {
    /// An algebra on all of `ℝ`.
    pub fn new(settings: GfSettings) -> Result<Algebra> {
        let mollifier = Mollifier::construct_with(settings.moment_order, settings.quad)?;
        Ok(Algebra {
            inner: Arc::new(AlgebraInner {
                settings,
                mollifier: Arc::new(mollifier),
                domain: (f64::NEG_INFINITY, f64::INFINITY),
            }),
        })
    }

    /// The same algebra over the open interval `(lo, hi)`.
    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Algebra> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!("({lo}, {hi}) is not an open interval")));
        }
        Ok(Algebra {
            inner: Arc::new(AlgebraInner {
                settings: self.inner.settings.clone(),
                mollifier: self.inner.mollifier.clone(),
                domain: (lo, hi),
            }),
        })
    }

    pub fn settings(&self) -> &GfSettings {
        &self.inner.settings
    }

    pub fn ctx(&self) -> &TruncationContext {
        &self.inner.settings.ctx
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.inner.mollifier
    }

    pub fn domain(&self) -> (f64, f64) {
        self.inner.domain
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.inner.domain;
        lo < x && x < hi
    }

    /// The seeded test-function battery used by weak equality and association.
    pub fn battery(&self) -> Vec<TestFunction> {
        battery(
            self.inner.settings.battery_size,
            self.inner.settings.seed,
            self.inner.domain,
        )
    }

    /// The scale `s` in this algebra's context.
    pub fn s(&self) -> LcReal {
        LcReal::scale(self.ctx())
    }

    fn wrap(&self, node: Node) -> GenFunction {
        GenFunction {
            alg: self.clone(),
            node,
        }
    }

    pub fn zero(&self) -> GenFunction {
        self.wrap(Node::Zero)
    }

    pub fn constant(&self, c: LcComplex) -> GenFunction {
        self.wrap(Node::Scale(
            c.with_context(self.ctx()),
            Box::new(Node::Smooth(SmoothAtom::expr(SmoothExpr::one(), self.ctx()))),
        ))
    }

    pub fn real(&self, x: f64) -> GenFunction {
        self.constant(LcComplex::from_real(LcReal::constant(x, self.ctx())))
    }

    /// The image of a smooth function.
    pub fn embed_smooth(&self, f: SmoothExpr) -> GenFunction {
        self.wrap(Node::Smooth(SmoothAtom::expr(f, self.ctx())))
    }

    /// A smooth function known only through a derivative oracle.
    pub fn embed_oracle(&self, f: OracleFn) -> GenFunction {
        self.wrap(Node::Smooth(SmoothAtom {
            kind: SmoothKind::Oracle(f),
            shift: LcReal::zero(self.ctx()),
            param: None,
        }))
    }

    /// `δ^(k)(x - λ)`.
    pub fn delta(&self, lambda: f64, k: usize) -> GenFunction {
        self.wrap(Node::Singular(Singular {
            kind: SingularKind::Delta(k),
            center: lambda,
            shift: LcReal::zero(self.ctx()),
            width: 1.0,
        }))
    }

    /// `H(x)`.
    pub fn heaviside(&self) -> GenFunction {
        self.heaviside_at(0.0)
    }

    /// `H(x - λ)`.
    pub fn heaviside_at(&self, lambda: f64) -> GenFunction {
        self.wrap(Node::Singular(Singular {
            kind: SingularKind::Heaviside,
            center: lambda,
            shift: LcReal::zero(self.ctx()),
            width: 1.0,
        }))
    }

    /// `f(λ0, ·)` for a family `f(z, t)` written in the variables `z` and `t`.
    pub fn specialize_parameter(&self, family: SmoothExpr, lambda0: &LcComplex) -> Result<GenFunction> {
        if !lambda0.is_finite() {
            return Err(Error::NotFinite(lambda0.valuation().to_string()));
        }
        Ok(self.wrap(Node::Smooth(SmoothAtom {
            kind: SmoothKind::Expr(family),
            shift: LcReal::zero(self.ctx()),
            param: Some(lambda0.with_context(self.ctx())),
        })))
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Zero,
    Smooth(SmoothAtom),
    Singular(Singular),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Scale(LcComplex, Box<Node>),
}

impl Node {
    fn map_atoms(&self, f: &mut dyn FnMut(&Node) -> Result<Node>) -> Result<Node> {
        Ok(match self {
            Node::Zero => Node::Zero,
            Node::Smooth(_) | Node::Singular(_) => f(self)?,
            Node::Sum(v) => Node::Sum(v.iter().map(|n| n.map_atoms(f)).collect::<Result<_>>()?),
            Node::Product(v) => {
                Node::Product(v.iter().map(|n| n.map_atoms(f)).collect::<Result<_>>()?)
            }
            Node::Scale(c, n) => Node::Scale(c.clone(), Box::new(n.map_atoms(f)?)),
        })
    }

    fn derive(&self) -> Node {
        match self {
            Node::Zero => Node::Zero,
            Node::Smooth(a) => Node::Smooth(a.derive()),
            Node::Singular(s) => Node::Singular(Singular {
                kind: SingularKind::Delta(s.delta_order().map_or(0, |k| k + 1)),
                ..s.clone()
            }),
            Node::Sum(v) => Node::Sum(v.iter().map(Node::derive).collect()),
            Node::Product(v) => Node::Sum(
                (0..v.len())
                    .map(|i| {
                        Node::Product(
                            v.iter()
                                .enumerate()
                                .map(|(j, n)| if i == j { n.derive() } else { n.clone() })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
            Node::Scale(c, n) => Node::Scale(c.clone(), Box::new(n.derive())),
        }
    }

    fn evaluate(&self, x: &LcReal, phi: &Mollifier) -> Result<LcComplex> {
        let ctx = x.ctx();
        Ok(match self {
            Node::Zero => LcComplex::zero(ctx),
            Node::Smooth(a) => a.evaluate(&LcComplex::from_real(x.clone()))?,
            Node::Singular(s) => s.evaluate(x, phi)?,
            Node::Sum(v) => {
                let mut acc = LcComplex::zero(ctx);
                for n in v {
                    acc = &acc + &n.evaluate(x, phi)?;
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = LcComplex::one(ctx);
                for n in v {
                    acc = &acc * &n.evaluate(x, phi)?;
                }
                acc
            }
            Node::Scale(c, n) => c * &n.evaluate(x, phi)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Sum(v) if v.len() > 1 => 1,
            Node::Scale(..) | Node::Product(_) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrapped = |n: &Node, f: &mut fmt::Formatter<'_>, min: u8| {
            if n.precedence() < min {
                write!(f, "(")?;
                n.write(f)?;
                write!(f, ")")
            } else {
                n.write(f)
            }
        };
        match self {
            Node::Zero => write!(f, "0"),
            Node::Smooth(a) => write!(f, "{a}"),
            Node::Singular(s) => write!(f, "{s}"),
            Node::Sum(v) if v.is_empty() => write!(f, "0"),
            Node::Sum(v) => {
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    wrapped(n, f, 2)?;
                }
                Ok(())
            }
            Node::Product(v) if v.is_empty() => write!(f, "1"),
            Node::Product(v) => {
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    wrapped(n, f, 3)?;
                }
                Ok(())
            }
            Node::Scale(c, n) => {
                let is_one = matches!(&**n, Node::Smooth(a) if a.as_constant() == Some(Complex64::new(1.0, 0.0)) && a.param.is_none());
                let text = c.to_string();
                let simple = c.exponents().len() <= 1 && c.is_real();
                if is_one {
                    if simple {
                        write!(f, "{text}")
                    } else {
                        write!(f, "({text})")
                    }
                } else {
                    if simple {
                        write!(f, "{text}*")?;
                    } else {
                        write!(f, "({text})*")?;
                    }
                    wrapped(n, f, 3)
                }
            }
        }
    }
}

/// An element of the algebra: an expression tree tied to an [`Algebra`].
#[derive(Clone, Debug)]
pub struct GenFunction {
    alg: Algebra,
    node: Node,
}

impl GenFunction {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }

    pub(crate) fn from_node(alg: &Algebra, node: Node) -> GenFunction {
        GenFunction {
            alg: alg.clone(),
            node,
        }
    }

    fn check_same(&self, other: &GenFunction) {
        assert!(
            self.alg == other.alg,
            "generalized functions from different algebras cannot be combined"
        );
    }

    pub fn is_structurally_zero(&self) -> bool {
        matches!(self.node, Node::Zero)
    }

    /// Symbolic derivative: `δ^(k) → δ^(k+1)`, `H' = δ`, Leibniz on products.
    pub fn derive(&self) -> GenFunction {
        GenFunction::from_node(&self.alg, self.node.derive())
    }

    pub fn derive_n(&self, n: usize) -> GenFunction {
        (0..n).fold(self.clone(), |f, _| f.derive())
    }

    pub fn multiply(&self, other: &GenFunction) -> GenFunction {
        self * other
    }

    pub fn scale(&self, c: &LcComplex) -> GenFunction {
        GenFunction::from_node(
            &self.alg,
            Node::Scale(c.with_context(self.alg.ctx()), Box::new(self.node.clone())),
        )
    }

    pub fn scale_real(&self, x: f64) -> GenFunction {
        self.scale(&LcComplex::from_real(LcReal::constant(x, self.alg.ctx())))
    }

    pub fn powi(&self, n: usize) -> GenFunction {
        if n == 0 {
            return self.alg.real(1.0);
        }
        GenFunction::from_node(&self.alg, Node::Product(vec![self.node.clone(); n]))
    }

    /// `f(x - h)`: the standard part of `h` moves real centers, the
    /// infinitesimal part moves atom shifts.
    pub fn translate(&self, h: &LcReal) -> Result<GenFunction> {
        let ctx = self.alg.ctx();
        let h = h.with_context(ctx);
        let c = h.standard_part()?;
        let eps = h.infinitesimal_part()?;
        let node = self.node.map_atoms(&mut |n| {
            Ok(match n {
                Node::Smooth(a) => Node::Smooth(a.translate(c, &eps)),
                Node::Singular(s) => Node::Singular(Singular {
                    center: s.center + c,
                    shift: &s.shift + &eps,
                    ..s.clone()
                }),
                other => other.clone(),
            })
        })?;
        Ok(GenFunction::from_node(&self.alg, node))
    }

    /// `f(a x + b)` for `a ≠ 0`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Result<GenFunction> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("x ↦ {a} x + {b} is not a diffeomorphism")));
        }
        let ctx = self.alg.ctx().clone();
        let node = self.node.map_atoms(&mut |n| {
            Ok(match n {
                Node::Smooth(atom) => Node::Smooth(atom.compose_affine(a, b)),
                Node::Singular(s) => {
                    let moved = Singular {
                        center: (s.center - b) / a,
                        shift: s.shift.scale_by(1.0 / a),
                        width: s.width / a.abs(),
                        kind: s.kind,
                    };
                    match s.kind {
                        SingularKind::Delta(k) => Node::Scale(
                            LcComplex::constant(
                                Complex64::new(a.powi(-(k as i32)) / a.abs(), 0.0),
                                &ctx,
                            ),
                            Box::new(Node::Singular(moved)),
                        ),
                        SingularKind::Heaviside if a > 0.0 => Node::Singular(moved),
                        SingularKind::Heaviside => Node::Sum(vec![
                            Node::Smooth(SmoothAtom::expr(SmoothExpr::one(), &ctx)),
                            Node::Scale(
                                LcComplex::constant(Complex64::new(-1.0, 0.0), &ctx),
                                Box::new(Node::Singular(moved)),
                            ),
                        ]),
                    }
                }
                other => other.clone(),
            })
        })?;
        Ok(GenFunction::from_node(&self.alg, node))
    }

    /// Restriction to the monad of the open interval `(lo, hi) ⊆ Ω`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<GenFunction> {
        let (a, b) = self.alg.domain();
        if lo < a || hi > b || lo >= hi {
            return Err(Error::Domain(format!(
                "({lo}, {hi}) is not an open subinterval of ({a}, {b})"
            )));
        }
        let alg = self.alg.with_domain(lo, hi)?;
        let ctx = alg.ctx().clone();
        let node = self.node.map_atoms(&mut |n| {
            Ok(match n {
                Node::Singular(s) => match s.kind {
                    SingularKind::Delta(_) if s.center <= lo || s.center >= hi => Node::Zero,
                    SingularKind::Heaviside if s.center <= lo => {
                        Node::Smooth(SmoothAtom::expr(SmoothExpr::one(), &ctx))
                    }
                    SingularKind::Heaviside if s.center >= hi => Node::Zero,
                    _ => n.clone(),
                },
                other => other.clone(),
            })
        })?;
        Ok(GenFunction::from_node(&alg, node))
    }

    /// Value at an LC point of the monad of `Ω`.
    pub fn evaluate_at(&self, x: &LcReal) -> Result<LcComplex> {
        let x = x.with_context(self.alg.ctx());
        let x0 = x.standard_part()?;
        if !self.alg.contains(x0) {
            let (a, b) = self.alg.domain();
            return Err(Error::Domain(format!("st(x) = {x0} is outside ({a}, {b})")));
        }
        self.node.evaluate(&x, self.alg.mollifier())
    }

    /// The pairing functional `τ ↦ (f | τ)` in normal form.
    pub fn functional(&self) -> Result<Functional> {
        normal::build(self)
    }

    /// `(f | τ)`.
    pub fn pairing(&self, tau: &dyn Weight) -> Result<LcComplex> {
        self.functional()?.pair(tau)
    }

    pub fn support(&self) -> Result<SupportInfo> {
        support::support(self)
    }

    /// `∫ f`, for `f` with compact external support, as the pairing with a
    /// plateau equal to 1 near the support.
    pub fn integral_compact(&self) -> Result<LcComplex> {
        support::integral_compact(self)
    }

    /// Three-valued weak equality `f ≅ g`.
    pub fn weak_equal(&self, other: &GenFunction) -> Verdict {
        relations::weak_equal(self, other)
    }

    /// `f ∼ g`: every battery pairing differs by an infinitesimal.
    pub fn associated(&self, other: &GenFunction) -> Result<bool> {
        relations::associated(self, other)
    }
}

impl fmt::Display for GenFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.write(f)
    }
}

impl<'a> Add<&'a GenFunction> for &'a GenFunction {
    type Output = GenFunction;
    fn add(self, rhs: &GenFunction) -> GenFunction {
        self.check_same(rhs);
        let mut terms = Vec::new();
        for n in [&self.node, &rhs.node] {
            match n {
                Node::Zero => {}
                Node::Sum(v) => terms.extend(v.iter().cloned()),
                other => terms.push(other.clone()),
            }
        }
        let node = match terms.len() {
            0 => Node::Zero,
            1 => terms.pop().expect("one term"),
            _ => Node::Sum(terms),
        };
        GenFunction::from_node(&self.alg, node)
    }
}

impl<'a> Sub<&'a GenFunction> for &'a GenFunction {
    type Output = GenFunction;
    fn sub(self, rhs: &GenFunction) -> GenFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a GenFunction> for &'a GenFunction {
    type Output = GenFunction;
    fn mul(self, rhs: &GenFunction) -> GenFunction {
        self.check_same(rhs);
        if matches!(self.node, Node::Zero) || matches!(rhs.node, Node::Zero) {
            return self.alg.zero();
        }
        let mut factors = Vec::new();
        for n in [&self.node, &rhs.node] {
            match n {
                Node::Product(v) => factors.extend(v.iter().cloned()),
                other => factors.push(other.clone()),
            }
        }
        GenFunction::from_node(&self.alg, Node::Product(factors))
    }
}

impl Neg for &GenFunction {
    type Output = GenFunction;
    fn neg(self) -> GenFunction {
        self.scale_real(-1.0)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for GenFunction {
            type Output = GenFunction;
            fn $method(self, rhs: GenFunction) -> GenFunction {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for GenFunction {
    type Output = GenFunction;
    fn neg(self) -> GenFunction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lc::Exponent;

    fn alg() -> Algebra {
        Algebra::new(GfSettings::default()).unwrap()
    }

    fn tau() -> TestFunction {
        TestFunction::poly_bump(vec![0.4, -0.7, 0.2, 0.5], 0.3, 1.5)
    }

    #[test]
    fn shifted_delta_pairs_to_taylor_lift() {
        let a = alg();
        let d = a.delta(0.0, 0).translate(&a.s().scale_by(2.0)).unwrap();
        let p = d.pairing(&tau()).unwrap();
        let t = tau().taylor(0.0, 6);
        for j in 0..=6 {
            let want = t[j].re * 2f64.powi(j as i32);
            let got = p.coefficient(&Exponent::integer(j as i64)).re;
            assert!((got - want).abs() < 1e-12, "j={j}: {got} vs {want}");
        }
    }

    #[test]
    fn heaviside_times_delta_is_half_delta() {
        let a = alg();
        let hd = &a.heaviside() * &a.delta(0.0, 0);
        let p = hd.pairing(&tau()).unwrap();
        let want = 0.5 * tau().value(0.0).re;
        assert!((p.coefficient(&Exponent::zero()).re - want).abs() < 1e-8);
        assert!(hd.associated(&a.delta(0.0, 0).scale_real(0.5)).unwrap());
        assert!(!hd.weak_equal(&a.delta(0.0, 0).scale_real(0.5)).is_true());
    }

    #[test]
    fn delta_squared_has_valuation_minus_one() {
        let a = alg();
        let d2 = a.delta(0.0, 0).powi(2);
        let v = d2.integral_compact().unwrap();
        let lead = v.coefficient(&Exponent::integer(-1)).re;
        let phi = a.mollifier();
        let direct = a
            .settings()
            .quad
            .integrate(|u| phi.value(u).powi(2), -1.0, 1.0)
            .unwrap();
        assert!((lead - direct).abs() < 1e-8);
    }

    #[test]
    fn smooth_times_delta_collapses() {
        let a = alg();
        let psi = a.embed_smooth(SmoothExpr::cos(SmoothExpr::t()));
        let lhs = &psi * &a.delta(0.0, 0);
        assert_eq!(lhs.weak_equal(&a.delta(0.0, 0)), Verdict::True);
        assert_eq!(a.delta(0.0, 0).weak_equal(&a.delta(0.0, 0).translate(&a.s()).unwrap()), Verdict::False);
    }

    #[test]
    fn derivative_of_heaviside_is_delta() {
        let a = alg();
        assert_eq!(a.heaviside().derive().weak_equal(&a.delta(0.0, 0)), Verdict::True);
        let h2 = a.heaviside().powi(2);
        assert!(h2.associated(&a.heaviside()).unwrap());
    }

    #[test]
    fn heaviside_values() {
        let a = alg();
        let s = a.s();
        assert!(a.heaviside().evaluate_at(&s.scale_by(-2.0)).unwrap().is_zero());
        let one = a.heaviside().evaluate_at(&s.scale_by(3.0)).unwrap();
        assert_eq!(one.standard_part().unwrap().re, 1.0);
        let mid = a.heaviside().evaluate_at(&LcReal::zero(a.ctx())).unwrap();
        assert!((mid.standard_part().unwrap().re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn supports() {
        let a = alg();
        let d = a.delta(0.0, 0).translate(&a.s().scale_by(2.0)).unwrap();
        let info = d.support().unwrap();
        assert_eq!(info.external, vec![ExternalPiece { lo: 0.0, hi: 0.0 }]);
        assert_eq!(info.internal[0].lo.as_ref().unwrap(), &a.s());
        assert!(matches!(a.heaviside().integral_compact(), Err(Error::Support(_))));
    }
}
