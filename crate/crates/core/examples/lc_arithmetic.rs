//! Arithmetic in the truncated Levi-Civita field: series in the infinitesimal
//! scale `s`, valuations, roots and the JSON term format.

use lcgf::lc::{Exponent, LcComplex, LcReal, TruncationContext};

fn main() -> lcgf::Result<()> {
    let ctx = TruncationContext::with_q_max(Exponent::integer(4))?;
    let s = LcReal::scale(&ctx);
    let one = LcReal::one(&ctx);

    let x = &one - &s;
    println!("1/(1 - s)        = {}", x.invert()?);
    println!("v(s^3 + 2 s)     = {}", (&s.powi(3)? + &s.scale_by(2.0)).valuation());

    let inf = s.invert()?;
    println!("1/s              = {}  ({:?})", inf, inf.classify());

    let y = &one + &s;
    let r = y.nth_root(2)?;
    println!("sqrt(1 + s)      = {r}");
    println!("residual of r^2  : v = {}", r.powi(2)?.residual_valuation(&y, 1e-12));

    let half = LcReal::exp_scale(Exponent::ratio(1, 2), &ctx);
    println!("s^(1/2) * s^(1/2) = {}", &half * &half);

    let z = LcComplex::new(one.clone(), s.scale_by(-3.0))?;
    println!("(1 - 3 s i)^2    = {}", z.powi(2)?);
    println!("as JSON          : {}", serde_json::to_string(&z).expect("serializable"));
    Ok(())
}
