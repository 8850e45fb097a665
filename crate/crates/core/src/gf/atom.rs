use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lc::{lift_smooth, taylor_depth, Exponent, LcComplex, LcReal, TruncationContext, Valuation};
use crate::mollifier::Mollifier;
use crate::smooth::{factorial, BoundExpr, DerivativeOracle, Jet, SmoothExpr, Var};

/// `factor * f^(deriv)(a x + b)` for a user-supplied oracle `f`.
#[derive(Clone, Debug)]
pub struct OracleFn {
    pub label: String,
    pub inner: Arc<dyn DerivativeOracle>,
    pub deriv: usize,
    pub a: f64,
    pub b: f64,
    pub factor: Complex64,
    /// Interval outside of which `f` vanishes identically, if known.
    pub support: Option<(f64, f64)>,
}

impl OracleFn {
    pub fn new(label: impl Into<String>, inner: Arc<dyn DerivativeOracle>) -> Self {
        OracleFn {
            label: label.into(),
            inner,
            deriv: 0,
            a: 1.0,
            b: 0.0,
            factor: Complex64::new(1.0, 0.0),
            support: None,
        }
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// Support in the outer variable `x`.
    pub fn x_support(&self) -> Option<(f64, f64)> {
        self.support.map(|(lo, hi)| {
            let p = (lo - self.b) / self.a;
            let q = (hi - self.b) / self.a;
            (p.min(q), p.max(q))
        })
    }

    fn derived(&self, j: usize) -> OracleFn {
        OracleFn {
            deriv: self.deriv + j,
            factor: self.factor * self.a.powi(j as i32),
            ..self.clone()
        }
    }
}

impl DerivativeOracle for OracleFn {
    fn taylor(&self, at: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let raw = self.inner.taylor(at * self.a + self.b, order + self.deriv)?;
        let d = Jet::from_coeffs(raw).differentiate(self.deriv);
        let mut ak = self.factor;
        Ok(d.coeffs()
            .iter()
            .take(order + 1)
            .map(|c| {
                let v = c * ak;
                ak *= self.a;
                v
            })
            .collect())
    }
}

#[derive(Clone, Debug)]
pub enum SmoothKind {
    Expr(SmoothExpr),
    Oracle(OracleFn),
}

/// A smooth function `g(x - shift; z = param)` with an infinitesimal shift
/// and an optional nonstandard parameter value.
#[derive(Clone, Debug)]
pub struct SmoothAtom {
    pub kind: SmoothKind,
    pub shift: LcReal,
    pub param: Option<LcComplex>,
}

/// A standard smooth factor: no infinitesimal shift, parameter bound to a
/// complex number.
pub(crate) type StdFactor = Arc<dyn DerivativeOracle>;

impl SmoothAtom {
    pub fn expr(e: SmoothExpr, ctx: &TruncationContext) -> Self {
        SmoothAtom {
            kind: SmoothKind::Expr(e),
            shift: LcReal::zero(ctx),
            param: None,
        }
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match &self.kind {
            SmoothKind::Expr(e) => e.as_const(),
            SmoothKind::Oracle(_) => None,
        }
    }

    pub fn derive(&self) -> SmoothAtom {
        let kind = match &self.kind {
            SmoothKind::Expr(e) => SmoothKind::Expr(e.diff(Var::T)),
            SmoothKind::Oracle(o) => SmoothKind::Oracle(o.derived(1)),
        };
        SmoothAtom {
            kind,
            ..self.clone()
        }
    }

    /// `g(x - c)` for real `c`; `extra` is added to the infinitesimal shift.
    pub fn translate(&self, c: f64, extra: &LcReal) -> SmoothAtom {
        let kind = match &self.kind {
            SmoothKind::Expr(e) if c != 0.0 => SmoothKind::Expr(e.subst_affine(1.0, -c)),
            SmoothKind::Oracle(o) => SmoothKind::Oracle(OracleFn {
                b: o.b - o.a * c,
                ..o.clone()
            }),
            k => k.clone(),
        };
        SmoothAtom {
            kind,
            shift: &self.shift + extra,
            param: self.param.clone(),
        }
    }

    /// `g(a x + b)`.
    pub fn compose_affine(&self, a: f64, b: f64) -> SmoothAtom {
        let kind = match &self.kind {
            SmoothKind::Expr(e) => SmoothKind::Expr(e.subst_affine(a, b)),
            SmoothKind::Oracle(o) => SmoothKind::Oracle(OracleFn {
                a: o.a * a,
                b: o.a * b + o.b,
                ..o.clone()
            }),
        };
        SmoothAtom {
            kind,
            shift: self.shift.scale_by(1.0 / a),
            param: self.param.clone(),
        }
    }

    fn split_param(&self, ctx: &TruncationContext) -> Result<(Option<Complex64>, LcComplex)> {
        let needs = matches!(&self.kind, SmoothKind::Expr(e) if e.depends_on(Var::Z));
        match (&self.param, needs) {
            (Some(p), true) => {
                let p = p.with_context(ctx);
                Ok((Some(p.standard_part()?), p.infinitesimal_part()?))
            }
            (None, true) => Err(Error::Domain("parameter z is unbound".into())),
            _ => Ok((None, LcComplex::zero(ctx))),
        }
    }

    fn bound(&self, x_deriv: usize, z_deriv: usize, z0: Option<Complex64>) -> StdFactor {
        match &self.kind {
            SmoothKind::Expr(e) => {
                let d = e.diff_n(Var::Z, z_deriv).diff_n(Var::T, x_deriv);
                match z0 {
                    Some(z) if d.depends_on(Var::Z) => Arc::new(BoundExpr { expr: d, z }),
                    _ => Arc::new(d),
                }
            }
            SmoothKind::Oracle(o) => Arc::new(o.derived(x_deriv)),
        }
    }

    /// Expands the infinitesimal shift and parameter offset:
    /// `g(x - σ; z0 + ζ) = Σ (-σ)^j ζ^m / (j! m!) ∂_x^j ∂_z^m g(x; z0)`.
    pub(crate) fn standardize(&self, ctx: &TruncationContext) -> Result<Vec<(LcComplex, StdFactor)>> {
        let (z0, zeta) = self.split_param(ctx)?;
        let minus_sigma = LcComplex::from_real(-self.shift.with_context(ctx));
        let jmax = taylor_depth(&minus_sigma);
        let mmax = taylor_depth(&zeta);
        let mut out = Vec::new();
        let mut zeta_pow = LcComplex::one(ctx);
        for m in 0..=mmax {
            let mut sig_pow = LcComplex::one(ctx);
            for j in 0..=jmax {
                let coeff = (&zeta_pow * &sig_pow).scale_real(1.0 / (factorial(j) * factorial(m)));
                if !coeff.is_zero() {
                    out.push((coeff, self.bound(j, m, z0)));
                }
                sig_pow = &sig_pow * &minus_sigma;
            }
            zeta_pow = &zeta_pow * &zeta;
        }
        Ok(out)
    }

    /// Value at a finite point of the monad.
    pub fn evaluate(&self, x: &LcComplex) -> Result<LcComplex> {
        let ctx = x.ctx().clone();
        let (z0, zeta) = self.split_param(&ctx)?;
        let arg = x - &LcComplex::from_real(self.shift.with_context(&ctx));
        let mmax = taylor_depth(&zeta);
        let mut acc = LcComplex::zero(&ctx);
        let mut zeta_pow = LcComplex::one(&ctx);
        for m in 0..=mmax {
            let f = self.bound(0, m, z0);
            let v = lift_smooth(f.as_ref(), &arg)?;
            acc = &acc + &(&v * &zeta_pow).scale_real(1.0 / factorial(m));
            zeta_pow = &zeta_pow * &zeta;
        }
        Ok(acc)
    }

    fn argument_text(&self) -> String {
        if self.shift.is_zero() {
            "t".to_string()
        } else {
            format!("t {}", signed_tail(&self.shift))
        }
    }
}

/// `" - L"` / `" + L"` formatting for the tail of `t - L`.
pub(crate) fn signed_tail(l: &LcReal) -> String {
    if l.signum() < 0 {
        format!("+ {}", -l)
    } else {
        format!("- {l}")
    }
}

impl fmt::Display for SmoothAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.argument_text();
        let body = match &self.kind {
            SmoothKind::Expr(e) => e.render(&t),
            SmoothKind::Oracle(o) => {
                let mut s = o.label.clone();
                for _ in 0..o.deriv {
                    s.push('\'');
                }
                let inner = if o.a == 1.0 && o.b == 0.0 {
                    t.clone()
                } else {
                    format!("{}*({t}) + {}", o.a, o.b)
                };
                if o.factor == Complex64::new(1.0, 0.0) {
                    format!("{s}({inner})")
                } else {
                    format!("{}*{s}({inner})", crate::smooth::format_complex(o.factor))
                }
            }
        };
        match &self.param {
            Some(p) => write!(f, "[{body}]_(z = {p})"),
            None => f.write_str(&body),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularKind {
    /// `δ^(k)`.
    Delta(usize),
    Heaviside,
}

/// A delta or Heaviside atom located at `center + shift`.
///
/// The representative is `(w s)^(-1-k) φ^(k)((x - L)/(w s))` for a delta and
/// `Φ((x - L)/(w s))` for a Heaviside, where `w = width`.
#[derive(Clone, Debug)]
pub struct Singular {
    pub kind: SingularKind,
    pub center: f64,
    pub shift: LcReal,
    pub width: f64,
}

impl Singular {
    pub fn location(&self) -> LcReal {
        &LcReal::constant(self.center, self.shift.ctx()) + &self.shift
    }

    pub fn delta_order(&self) -> Option<usize> {
        match self.kind {
            SingularKind::Delta(k) => Some(k),
            SingularKind::Heaviside => None,
        }
    }

    /// Value of the representative at an LC point.
    pub fn evaluate(&self, x: &LcReal, phi: &Mollifier) -> Result<LcComplex> {
        let ctx = x.ctx().clone();
        let k = self.delta_order().unwrap_or(0);
        let extra = Exponent::integer(k as i64 + 2);
        let wide = ctx.widened(&extra);
        let diff = x.with_context(&wide).checked_sub(&self.location().with_context(&wide))?;
        let u = diff.shift_exponent(&Exponent::integer(-1)).scale_by(1.0 / self.width);
        let zero = LcComplex::zero(&ctx);
        let one = LcComplex::one(&ctx);
        let inside = match u.valuation() {
            Valuation::Finite(v) if v.is_negative() => None,
            _ => {
                let u0 = u.standard_part()?;
                if u0.abs() >= 1.0 {
                    None
                } else {
                    Some(u0)
                }
            }
        };
        let u0 = match inside {
            Some(u0) => u0,
            None => {
                return Ok(match self.kind {
                    SingularKind::Delta(_) => zero,
                    SingularKind::Heaviside => {
                        if u.signum() > 0 {
                            one
                        } else {
                            zero
                        }
                    }
                })
            }
        };
        let eps = LcComplex::from_real(u.infinitesimal_part()?);
        let depth = taylor_depth(&eps);
        let coeffs: Vec<Complex64> = match self.kind {
            SingularKind::Delta(k) => phi.derivative_taylor(k, u0, depth),
            SingularKind::Heaviside => phi.cumulative_taylor(u0, depth),
        }
        .into_iter()
        .map(|c| Complex64::new(c, 0.0))
        .collect();
        let lifted = crate::lc::eval_taylor(&coeffs, &eps);
        Ok(match self.kind {
            SingularKind::Delta(k) => lifted
                .shift_exponent(&Exponent::integer(-1 - k as i64))
                .scale_real(self.width.powi(-1 - k as i32))
                .with_context(&ctx),
            SingularKind::Heaviside => lifted.with_context(&ctx),
        })
    }

    fn argument_text(&self) -> String {
        let loc = self.location();
        let tail = if loc.is_zero() {
            "t".to_string()
        } else {
            format!("t {}", signed_tail(&loc))
        };
        if self.width == 1.0 {
            tail
        } else {
            format!("({tail})/{}", self.width)
        }
    }
}

impl fmt::Display for Singular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = self.argument_text();
        match self.kind {
            SingularKind::Heaviside => write!(f, "H({arg})"),
            SingularKind::Delta(k) => {
                // δ_w^(k)(y) = w^(-1-k) δ^(k)(y/w)
                if self.width != 1.0 {
                    write!(f, "{}*", self.width.powi(-1 - k as i32))?;
                }
                if k == 0 {
                    write!(f, "delta({arg})")
                } else {
                    write!(f, "delta_n({k}, {arg})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> TruncationContext {
        TruncationContext::default()
    }

    #[test]
    fn standardize_shifted_sine() {
        let c = ctx();
        let atom = SmoothAtom {
            kind: SmoothKind::Expr(SmoothExpr::sin(SmoothExpr::t())),
            shift: LcReal::scale(&c).scale_by(2.0),
            param: None,
        };
        let parts = atom.standardize(&c).unwrap();
        assert_eq!(parts.len(), 7);
        // Σ (-2s)^j/j! sin^(j)(0) = sin(-2s)
        let mut total = LcComplex::zero(&c);
        for (coeff, f) in &parts {
            total = &total + &coeff.scale_by(f.value(Complex64::new(0.0, 0.0)).unwrap());
        }
        let direct = lift_smooth(
            &SmoothExpr::sin(SmoothExpr::t()),
            &LcComplex::from_real(LcReal::scale(&c).scale_by(-2.0)),
        )
        .unwrap();
        assert!(total.approx_eq(&direct, 1e-15));
    }

    #[test]
    fn parameter_expansion_matches_lift() {
        let c = ctx();
        let family = SmoothExpr::exp(SmoothExpr::neg(SmoothExpr::mul(SmoothExpr::z(), SmoothExpr::t())));
        let z = LcComplex::from_real(&LcReal::one(&c) + &LcReal::scale(&c));
        let atom = SmoothAtom {
            kind: SmoothKind::Expr(family),
            shift: LcReal::zero(&c),
            param: Some(z.clone()),
        };
        let v = atom.evaluate(&LcComplex::one(&c)).unwrap();
        let oracle = lift_smooth(&SmoothExpr::exp(SmoothExpr::neg(SmoothExpr::t())), &z).unwrap();
        assert!(v.approx_eq(&oracle, 1e-14));
    }

    #[test]
    fn unbound_parameter_is_a_domain_error() {
        let c = ctx();
        let atom = SmoothAtom::expr(SmoothExpr::mul(SmoothExpr::z(), SmoothExpr::t()), &c);
        assert!(matches!(atom.evaluate(&LcComplex::one(&c)), Err(Error::Domain(_))));
    }

    #[test]
    fn oracle_affine_taylor() {
        let o = OracleFn::new("exp", Arc::new(SmoothExpr::exp(SmoothExpr::t())));
        let atom = SmoothAtom {
            kind: SmoothKind::Oracle(o),
            shift: LcReal::zero(&ctx()),
            param: None,
        }
        .compose_affine(2.0, 1.0)
        .derive();
        // d/dx e^{2x+1} = 2 e^{2x+1}
        if let SmoothKind::Oracle(o) = &atom.kind {
            let t = o.taylor(Complex64::new(0.0, 0.0), 1).unwrap();
            assert!((t[0].re - 2.0 * 1f64.exp()).abs() < 1e-12);
            assert!((t[1].re - 4.0 * 1f64.exp()).abs() < 1e-12);
        } else {
            unreachable!()
        }
    }
}
