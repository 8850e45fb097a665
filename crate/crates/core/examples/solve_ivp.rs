//! Solves `y'' + y ~= delta(t - 2s)` through the transform and verifies the
//! initial values and the equation inside the algebra.

use lcgf::gf::{Algebra, GfSettings};
use lcgf::laplace::{solve_ivp, DomainElement, EqualityMode, IvpSpec};
use lcgf::lc::LcComplex;

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let ctx = alg.ctx();
    let kick = alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0))?;

    for (y0, yp0) in [(0.0, 1.0), (0.0, 0.0)] {
        let spec = IvpSpec {
            a2: 1.0,
            a1: 0.0,
            a0: 1.0,
            rhs: DomainElement::generalized(LcComplex::one(ctx), kick.clone()),
            y0: LcComplex::from_real(lcgf::lc::LcReal::constant(y0, ctx)),
            yp0: LcComplex::from_real(lcgf::lc::LcReal::constant(yp0, ctx)),
            mode: EqualityMode::Weak,
        };
        let sol = solve_ivp(&spec, &alg)?;
        println!("y(0) = {y0}, y'(0) = {yp0}");
        println!("  L[y]  = {}", sol.image);
        println!("  y     = {}", sol.solution);
        println!(
            "  y(0) = {}, y'(0) = {}, equation {}",
            sol.y0_obtained,
            sol.yp0_obtained.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            sol.equation
        );
    }
    Ok(())
}
