//! Weak equality in the algebra against equality of transforms, on a few
//! pairs of transformable functions.

use lcgf::gf::{Algebra, GfSettings};
use lcgf::laplace::{check_transform_equivalence, ClassicalFn, DomainElement};
use lcgf::lc::LcComplex;

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let ctx = alg.ctx();
    let one = || LcComplex::one(ctx);
    let two_s = alg.s().scale_by(2.0);
    let kick = alg.delta(0.0, 0).translate(&two_s)?;
    let h = alg.heaviside().translate(&two_s)?;

    let pairs = [
        (
            "sin t vs sin t",
            DomainElement::classical(one(), ClassicalFn::sin(1.0)),
            DomainElement::classical(one(), ClassicalFn::sin(1.0)),
        ),
        (
            "delta(t-2s) vs H'(t-2s)",
            DomainElement::generalized(one(), kick.clone()),
            DomainElement::generalized(one(), h.derive()),
        ),
        (
            "delta(t-2s) vs delta(t-3s)",
            DomainElement::generalized(one(), kick.clone()),
            DomainElement::generalized(one(), alg.delta(0.0, 0).translate(&alg.s().scale_by(3.0))?),
        ),
    ];
    for (name, f, g) in pairs {
        let check = check_transform_equivalence(&f, &g, &alg)?;
        println!("{name:<28} weak: {:<6} images equal: {:<6} agree: {}", check.weak, check.images_equal, check.agree());
    }
    Ok(())
}
