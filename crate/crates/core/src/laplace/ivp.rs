use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Algebra, GenFunction, Verdict};
use crate::lc::{LcComplex, LcReal, TruncationContext};

use super::classical::DomainElement;
use super::image::{inverse_transform, transform, LaplaceImage};
use super::poly::Poly;

/// How the differential equation is required to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityMode {
    Exact,
    Weak,
}

/// `a2 y'' + a1 y' + a0 y = rhs` with `y(0)`, `y'(0)` given.
#[derive(Clone, Debug)]
pub struct IvpSpec {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub rhs: DomainElement,
    pub y0: LcComplex,
    pub yp0: LcComplex,
    pub mode: EqualityMode,
}

impl IvpSpec {
    pub fn order(&self) -> usize {
        if self.a2 != 0.0 {
            2
        } else {
            1
        }
    }

    /// `a2 z^2 + a1 z + a0`.
    pub fn characteristic(&self, ctx: &TruncationContext) -> Poly {
        Poly::from_real(&[self.a0, self.a1, self.a2], ctx)
    }

    /// The image of the initial-value terms: `a2 (z y0 + y1) + a1 y0`.
    pub fn initial_terms(&self, ctx: &TruncationContext) -> Poly {
        let y0 = self.y0.with_context(ctx);
        let y1 = self.yp0.with_context(ctx);
        Poly::new(
            vec![
                &y1.scale_real(self.a2) + &y0.scale_real(self.a1),
                y0.scale_real(self.a2),
            ],
            ctx,
        )
    }

    pub fn lhs(&self, y: &GenFunction) -> GenFunction {
        let mut acc = y.scale_real(self.a0);
        if self.a1 != 0.0 {
            acc = &acc + &y.derive().scale_real(self.a1);
        }
        if self.a2 != 0.0 {
            acc = &acc + &y.derive_n(2).scale_real(self.a2);
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct IvpSolution {
    pub image: LaplaceImage,
    pub solution: DomainElement,
    pub y: GenFunction,
    pub y0_obtained: LcComplex,
    pub yp0_obtained: Option<LcComplex>,
    pub initial_ok: bool,
    pub equation: Verdict,
}

impl IvpSolution {
    pub fn verified(&self) -> bool {
        self.initial_ok && self.equation.is_true()
    }
}

/// Sample points for exact comparison: a few real points plus the monad
/// around every singular location.
fn probe_points(ctx: &TruncationContext, spec: &IvpSpec) -> Vec<LcReal> {
    let s = LcReal::scale(ctx);
    let mut out: Vec<LcReal> = [0.5, 1.0, 2.5].iter().map(|x| LcReal::constant(*x, ctx)).collect();
    let mut centers = vec![LcReal::zero(ctx)];
    for (_, f) in &spec.rhs.classical {
        if let Some(d) = &f.delay {
            centers.push(d.clone());
        }
    }
    for (_, psi) in &spec.rhs.generalized {
        if let Ok(info) = psi.support() {
            for p in info.internal {
                if let (Some(lo), Some(hi)) = (p.lo, p.hi) {
                    centers.push((&lo + &hi).scale_by(0.5));
                }
            }
        }
    }
    for c in centers {
        for k in [-0.5, 0.25, 0.5] {
            out.push(&c + &s.scale_by(k));
        }
    }
    out
}

/// Solves the IVP by transforming, solving the algebraic image equation and
/// inverting, then verifies the initial values at the LC point 0 and the
/// equation itself.
pub fn solve_ivp(spec: &IvpSpec, alg: &Algebra) -> Result<IvpSolution> {
    if spec.a2 == 0.0 && spec.a1 == 0.0 {
        return Err(Error::Domain("the equation has no derivative terms".into()));
    }
    let ctx = alg.ctx();
    let rhs_image = transform(&spec.rhs, ctx)?;
    let p = spec.characteristic(ctx);
    let init = LaplaceImage::single(spec.initial_terms(ctx), Poly::one(ctx), LcReal::zero(ctx))?;
    let image = rhs_image.add(&init)?.times_rational(&Poly::one(ctx), &p)?;
    let solution = inverse_transform(&image, alg)?;
    let y = solution.to_gen(alg)?;

    let origin = LcReal::zero(ctx);
    let y0_obtained = y.evaluate_at(&origin)?;
    let mut initial_ok = y0_obtained.approx_eq(&spec.y0.with_context(ctx), 1e-12);
    let yp0_obtained = if spec.order() == 2 {
        let v = y.derive().evaluate_at(&origin)?;
        initial_ok &= v.approx_eq(&spec.yp0.with_context(ctx), 1e-12);
        Some(v)
    } else {
        None
    };

    let lhs = spec.lhs(&y);
    let rhs = spec.rhs.to_gen(alg)?;
    let equation = match spec.mode {
        EqualityMode::Weak => lhs.weak_equal(&rhs),
        EqualityMode::Exact => {
            let mut verdict = Verdict::True;
            for x in probe_points(ctx, spec) {
                let l = lhs.evaluate_at(&x)?;
                let r = rhs.evaluate_at(&x)?;
                let scale = l.max_abs_coefficient().max(r.max_abs_coefficient()).max(1.0);
                if !l.approx_eq(&r, 1e-10 * scale) {
                    verdict = Verdict::False;
                    break;
                }
            }
            verdict
        }
    };
    Ok(IvpSolution {
        image,
        solution,
        y,
        y0_obtained,
        yp0_obtained,
        initial_ok,
        equation,
    })
}
