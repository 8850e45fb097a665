//! Products of singular generalized functions: `H delta ~ delta/2`,
//! `H^n ~ H`, and the infinite norm of `delta`.

use lcgf::gf::{Algebra, GfSettings, Weight};

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings::default())?;
    let (h, d) = (alg.heaviside(), alg.delta(0.0, 0));

    let hd = &h * &d;
    let tau = &alg.battery()[0];
    println!("<H delta, tau> = {}", hd.pairing(tau)?);
    println!("tau(0)/2       = {}", tau.value(0.0).re / 2.0);
    println!("H delta ~  delta/2 : {}", hd.associated(&d.scale_real(0.5))?);
    println!("H delta ~= delta/2 : {}", hd.weak_equal(&d.scale_real(0.5)));

    for n in 2..=3 {
        println!("H^{n} ~ H : {}", h.powi(n).associated(&h)?);
    }

    let norm2 = (&d * &d).integral_compact()?;
    println!("int delta^2 = {norm2}  (valuation {})", norm2.valuation());
    let norm = norm2.re().nth_root(2)?;
    println!("|delta|_2  = {norm}  ({:?})", norm.classify());
    Ok(())
}
