//! Pairs an infinitesimally shifted delta with test functions: the result is
//! `tau(2s)`, i.e. the Taylor polynomial of `tau` at 0 evaluated at `2s`.

use lcgf::gf::{Algebra, GfSettings, TestFunction, Weight};
use lcgf::lc::{eval_taylor, LcComplex};

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let two_s = alg.s().scale_by(2.0);
    let delta = alg.delta(0.0, 0).translate(&two_s)?;
    println!("psi = {delta}");

    let tau = TestFunction::poly_bump(vec![1.0, 0.5, -0.25], 0.3, 1.5);
    let paired = delta.pairing(&tau)?;
    let order = alg.ctx().q_max.to_f64() as usize;
    let expected = eval_taylor(&tau.taylor(0.0, order), &LcComplex::from_real(two_s));
    println!("<psi, tau> = {paired}");
    println!("tau(2s)    = {expected}");
    println!("max coefficient gap = {:.2e}", paired.max_abs_diff(&expected));

    let d1 = alg.delta(0.0, 1);
    println!("<delta', tau> = {}   (-tau'(0) = {})", d1.pairing(&tau)?, -tau.taylor(0.0, 1)[1].re);
    Ok(())
}
