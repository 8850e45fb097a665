//! Forward and inverse transforms, and the domain gate that rejects
//! `delta(t)` while accepting `delta(t - 2s)`.

use lcgf::gf::{Algebra, GfSettings};
use lcgf::laplace::{inverse_transform, transform_classical, transform_generalized, ClassicalFn, LaplaceImage, Poly};
use lcgf::lc::LcComplex;
use num_complex::Complex64;

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let ctx = alg.ctx();

    let sin = transform_classical(&ClassicalFn::sin(1.0), ctx)?;
    println!("L[sin t] = {sin}");
    let f = ClassicalFn::cos(2.0).with_exp(-1.0).with_power(1);
    let img = transform_classical(&f, ctx)?;
    println!("L[{f}] = {img}");
    println!("  back: {}", inverse_transform(&img, &alg)?);

    match transform_generalized(&alg.delta(0.0, 0)) {
        Err(e) => println!("L[delta] : {e}"),
        Ok(img) => println!("L[delta] = {img}"),
    }
    let shifted = alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0))?;
    let img = transform_generalized(&shifted)?;
    println!("L[{shifted}] = {img}");
    let z = LcComplex::constant(Complex64::new(1.0, 1.0), ctx);
    println!("  at z = 1 + i: {}", img.eval(&z)?);

    let delayed = LaplaceImage::single(Poly::one(ctx), Poly::from_real(&[1.0, 0.0, 1.0], ctx), alg.s().scale_by(2.0))?;
    println!("L^-1[{delayed}] = {}", inverse_transform(&delayed, &alg)?);
    Ok(())
}
