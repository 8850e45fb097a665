//! Replays the textbook transform table on `y'' + y = delta(t)`, `y(0) = 0`,
//! `y'(0) = 1` and prints every step together with the violated condition.

use lcgf::gf::{Algebra, GfSettings};
use lcgf::laplace::{audit_classical, AuditSpec, RhsAtom, Ruleset};
use lcgf::lc::{LcComplex, LcReal};

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let ctx = alg.ctx();
    let spec = AuditSpec {
        a2: 1.0,
        a1: 0.0,
        a0: 1.0,
        rhs: vec![(LcComplex::one(ctx), RhsAtom::Delta { order: 0, delay: LcReal::zero(ctx) })],
        y0: LcComplex::zero(ctx),
        yp0: LcComplex::one(ctx),
        eps: 0.1,
    };
    for ruleset in [Ruleset::Naive, Ruleset::Engineer] {
        let report = audit_classical(&spec, ruleset, &alg)?;
        println!("== {ruleset:?}");
        for line in &report.trace {
            println!("   {line}");
        }
        for v in &report.violations {
            println!("   violated: {v}");
        }
        println!("   verdict: {:?}", report.verdict);
    }

    let resolved = AuditSpec {
        rhs: vec![(LcComplex::one(ctx), RhsAtom::Delta { order: 0, delay: alg.s().scale_by(2.0) })],
        ..spec
    };
    let report = audit_classical(&resolved, Ruleset::Hat, &alg)?;
    println!("== Hat with delta(t - 2s)");
    for line in &report.trace {
        println!("   {line}");
    }
    println!("   verdict: {:?}", report.verdict);
    Ok(())
}
