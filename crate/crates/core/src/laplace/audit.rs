//! Replays the classical engineering table on an IVP and reports every
//! initial condition the resulting solution violates.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::Algebra;
use crate::lc::{LcComplex, LcReal, TruncationContext};

use super::classical::{ClassicalFn, DomainElement};
use super::image::{inverse_transform, transform_classical, transform_generalized, LaplaceImage};
use super::ivp::{solve_ivp, EqualityMode, IvpSpec};
use super::poly::Poly;

pub const RULE_SECOND_DERIVATIVE: &str = "L[f″] = z²L[f] − zf(0) − f′(0)";
pub const RULE_FIRST_DERIVATIVE: &str = "L[f′] = zL[f] − f(0)";
pub const RULE_DELTA: &str = "L[δ(t)] = 1";
pub const RULE_DELTA_N: &str = "L[δ^(n)(t)] = z^n";
pub const RULE_SHIFTED_DELTA: &str = "L[δ^(n)(t − ε)] = z^n e^(−εz)";
pub const RULE_HAT_SECOND_DERIVATIVE: &str = "L̂[f″] = z²L̂[f] − zf(0) − f′(0)";
pub const RULE_HAT_FIRST_DERIVATIVE: &str = "L̂[f′] = zL̂[f] − f(0)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ruleset {
    /// The textbook table, including `L[δ] = 1`.
    Naive,
    /// `δ(t)` replaced by `δ(t − ε)`, followed by the weak limit `ε → 0₊`.
    Engineer,
    /// The nonstandard transform, solved and verified in the algebra.
    Hat,
}

impl std::str::FromStr for Ruleset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Ruleset::Naive),
            "engineer" => Ok(Ruleset::Engineer),
            "hat" => Ok(Ruleset::Hat),
            other => Err(Error::Options(format!("unknown ruleset {other:?}"))),
        }
    }
}

/// A right-hand-side atom in the classical catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum RhsAtom {
    /// `δ^(order)(t − delay)`.
    Delta { order: usize, delay: LcReal },
    Classical(ClassicalFn),
}

/// An IVP as the classical table sees it.
#[derive(Clone, Debug)]
pub struct AuditSpec {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub rhs: Vec<(LcComplex, RhsAtom)>,
    pub y0: LcComplex,
    pub yp0: LcComplex,
    /// Delay substituted for `δ(t)` under the engineer ruleset.
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub condition: String,
    pub expected: LcComplex,
    pub obtained: LcComplex,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, obtained {}",
            self.condition, self.expected, self.obtained
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditVerdict {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContradictionReport {
    pub ruleset: Ruleset,
    pub trace: Vec<String>,
    pub solution: String,
    pub violations: Vec<Violation>,
    pub verdict: AuditVerdict,
}

/// The table entry for one atom under a ruleset, with the rule label used.
pub fn classical_table(atom: &RhsAtom, ruleset: Ruleset, ctx: &TruncationContext) -> Result<(LaplaceImage, String)> {
    match atom {
        RhsAtom::Delta { order, delay } => {
            let num = Poly::monomial(*order, LcComplex::one(ctx));
            let img = LaplaceImage::single(num, Poly::one(ctx), delay.clone())?;
            let label = match (ruleset, delay.is_zero(), *order) {
                (Ruleset::Hat, _, _) => {
                    return Err(Error::Unsupported("the nonstandard transform has no table entry for deltas".into()))
                }
                (_, true, 0) => RULE_DELTA.to_string(),
                (_, true, _) => RULE_DELTA_N.to_string(),
                (_, false, _) => RULE_SHIFTED_DELTA.to_string(),
            };
            Ok((img, label))
        }
        RhsAtom::Classical(f) => {
            let img = transform_classical(f, ctx)?;
            let label = format!("L[{f}] = {img}");
            Ok((img, label))
        }
    }
}

/// `y^(k)(0₊)` of a classical solution; generalized parts vanish on a
/// punctured right neighbourhood of 0 and do not contribute.
fn right_limits(sol: &DomainElement, order: usize, ctx: &TruncationContext) -> Result<Vec<LcComplex>> {
    let mut out = vec![LcComplex::zero(ctx); order + 1];
    for (c, f) in &sol.classical {
        let d = f.right_limits(order)?;
        for k in 0..=order {
            out[k] = &out[k] + &c.scale_by(d[k]);
        }
    }
    Ok(out)
}

fn check_initial(spec: &AuditSpec, sol: &DomainElement, ctx: &TruncationContext, suffix: &str) -> Result<Vec<Violation>> {
    let order = if spec.a2 != 0.0 { 1 } else { 0 };
    let lim = right_limits(sol, order, ctx)?;
    let mut out = Vec::new();
    let wanted = [(format!("y(0{suffix})"), &spec.y0), (format!("y′(0{suffix})"), &spec.yp0)];
    for (k, (name, expected)) in wanted.into_iter().enumerate().take(order + 1) {
        let expected = expected.with_context(ctx);
        let gap = &lim[k] - &expected;
        let infinitesimal = gap.max_abs_coefficient() <= 1e-9 || gap.is_infinitesimal();
        if !infinitesimal {
            out.push(Violation {
                condition: name,
                expected,
                obtained: lim[k].chop(1e-12),
            });
        }
    }
    Ok(out)
}

/// Substitutes `ε = 0` in a delay that is a real multiple of `ε`.
fn substitute_eps(f: &ClassicalFn, eps: &LcReal) -> ClassicalFn {
    let mut out = f.clone();
    if let (Some(a), Ok(e)) = (&f.delay, eps.standard_part()) {
        if let Ok(d) = a.standard_part() {
            let k = d / e;
            if e != 0.0 && (k - k.round()).abs() < 1e-12 && a.infinitesimal_part().is_ok_and(|x| x.is_zero()) {
                out.delay = None;
            }
        }
    }
    out
}

fn merge_like(sol: DomainElement) -> DomainElement {
    let mut out = DomainElement {
        classical: Vec::new(),
        generalized: sol.generalized,
    };
    for (c, f) in sol.classical {
        match out.classical.iter_mut().find(|(_, g)| *g == f) {
            Some((acc, _)) => *acc = &*acc + &c,
            None => out.classical.push((c, f)),
        }
    }
    out.classical.retain(|(c, _)| !c.is_zero());
    out
}

fn image_equation(spec: &AuditSpec, ctx: &TruncationContext, rhs: &LaplaceImage) -> Result<(String, LaplaceImage)> {
    let p = Poly::from_real(&[spec.a0, spec.a1, spec.a2], ctx);
    let y0 = spec.y0.with_context(ctx);
    let y1 = spec.yp0.with_context(ctx);
    let init = Poly::new(
        vec![&y1.scale_real(spec.a2) + &y0.scale_real(spec.a1), y0.scale_real(spec.a2)],
        ctx,
    );
    let total = rhs.add(&LaplaceImage::single(init, Poly::one(ctx), LcReal::zero(ctx))?)?;
    let lhs = p.to_string();
    let lhs = if lhs.contains(' ') { format!("({lhs})") } else { lhs };
    let text = format!("{lhs}L[y] = {total}");
    Ok((text, total.times_rational(&Poly::one(ctx), &p)?))
}

fn classical_pipeline(spec: &AuditSpec, ruleset: Ruleset, alg: &Algebra) -> Result<ContradictionReport> {
    let ctx = alg.ctx();
    let mut trace = Vec::new();
    if spec.a2 != 0.0 {
        trace.push(RULE_SECOND_DERIVATIVE.to_string());
    }
    if spec.a1 != 0.0 {
        trace.push(RULE_FIRST_DERIVATIVE.to_string());
    }
    let eps = LcReal::constant(spec.eps, ctx);
    let mut rhs = LaplaceImage::zero(ctx);
    for (c, atom) in &spec.rhs {
        let atom = match (ruleset, atom) {
            (Ruleset::Engineer, RhsAtom::Delta { order, delay }) if delay.is_zero() => {
                trace.push(format!("δ(t) ↦ δ(t − ε) with ε = {}", spec.eps));
                RhsAtom::Delta {
                    order: *order,
                    delay: eps.clone(),
                }
            }
            _ => atom.clone(),
        };
        let (img, label) = classical_table(&atom, ruleset, ctx)?;
        if !trace.contains(&label) {
            trace.push(label);
        }
        rhs = rhs.add(&img.scale(c)?)?;
    }
    let (equation, y_image) = image_equation(spec, ctx, &rhs)?;
    trace.push(equation);
    let sol = merge_like(inverse_transform(&y_image, alg)?);
    trace.push(format!("y = L⁻¹[{y_image}] = {sol}"));

    let (final_sol, suffix) = if ruleset == Ruleset::Engineer {
        for v in check_initial(spec, &sol, ctx, "₊")? {
            trace.push(format!("at ε = {}: {v}", spec.eps));
        }
        if check_initial(spec, &sol, ctx, "₊")?.is_empty() {
            trace.push(format!("at ε = {}: initial conditions hold", spec.eps));
        }
        let limit = DomainElement {
            classical: sol
                .classical
                .iter()
                .map(|(c, f)| (c.clone(), substitute_eps(f, &eps)))
                .collect(),
            generalized: sol.generalized.clone(),
        };
        let limit = merge_like(limit);
        trace.push(format!("weak limit ε → 0₊: y = {limit}"));
        (limit, "₊")
    } else {
        (sol, "₊")
    };
    let violations = check_initial(spec, &final_sol, ctx, suffix)?;
    let verdict = if violations.is_empty() {
        AuditVerdict::Consistent
    } else {
        AuditVerdict::Inconsistent
    };
    Ok(ContradictionReport {
        ruleset,
        trace,
        solution: final_sol.to_string(),
        violations,
        verdict,
    })
}

fn hat_pipeline(spec: &AuditSpec, alg: &Algebra) -> Result<ContradictionReport> {
    let ctx = alg.ctx();
    let mut trace = Vec::new();
    if spec.a2 != 0.0 {
        trace.push(RULE_HAT_SECOND_DERIVATIVE.to_string());
    }
    if spec.a1 != 0.0 {
        trace.push(RULE_HAT_FIRST_DERIVATIVE.to_string());
    }
    let mut rhs = DomainElement::default();
    for (c, atom) in &spec.rhs {
        match atom {
            RhsAtom::Delta { order, delay } => {
                let psi = alg.delta(0.0, *order).translate(delay)?;
                trace.push(format!("L̂[{psi}] = {}", transform_generalized(&psi)?));
                rhs = rhs.plus(DomainElement::generalized(c.clone(), psi));
            }
            RhsAtom::Classical(f) => {
                trace.push(format!("L̂[{f}] = {}", transform_classical(f, ctx)?));
                rhs = rhs.plus(DomainElement::classical(c.clone(), f.clone()));
            }
        }
    }
    let ivp = IvpSpec {
        a2: spec.a2,
        a1: spec.a1,
        a0: spec.a0,
        rhs,
        y0: spec.y0.clone(),
        yp0: spec.yp0.clone(),
        mode: EqualityMode::Weak,
    };
    let sol = solve_ivp(&ivp, alg)?;
    trace.push(format!("L̂[y] = {}", sol.image));
    trace.push(format!("y = {}", sol.solution));
    trace.push(format!("equation verified weakly: {}", sol.equation));
    let mut violations = Vec::new();
    let y0 = spec.y0.with_context(ctx);
    if !sol.y0_obtained.approx_eq(&y0, 1e-12) {
        violations.push(Violation {
            condition: "y(0)".into(),
            expected: y0,
            obtained: sol.y0_obtained.clone(),
        });
    }
    if let Some(v) = &sol.yp0_obtained {
        let yp0 = spec.yp0.with_context(ctx);
        if !v.approx_eq(&yp0, 1e-12) {
            violations.push(Violation {
                condition: "y′(0)".into(),
                expected: yp0,
                obtained: v.clone(),
            });
        }
    }
    let non_infinitesimal = violations
        .iter()
        .any(|v| !(&v.obtained - &v.expected).is_infinitesimal());
    let verdict = if non_infinitesimal || !sol.equation.is_true() {
        AuditVerdict::Inconsistent
    } else {
        AuditVerdict::Consistent
    };
    Ok(ContradictionReport {
        ruleset: Ruleset::Hat,
        trace,
        solution: sol.solution.to_string(),
        violations,
        verdict,
    })
}

/// Runs the selected pipeline. A contradiction is a report outcome, not an error.
pub fn audit_classical(spec: &AuditSpec, ruleset: Ruleset, alg: &Algebra) -> Result<ContradictionReport> {
    match ruleset {
        Ruleset::Hat => hat_pipeline(spec, alg),
        r => classical_pipeline(spec, r, alg),
    }
}
