use lcgf::gf::{Algebra, GfSettings};
use lcgf::smooth::SmoothExpr;

fn main() -> lcgf::Result<()> {
    let alg = Algebra::new(GfSettings { battery_size: 16, seed: 3, ..Default::default() })?;
    let d = alg.delta(0.0, 0);
    let t = alg.embed_smooth(SmoothExpr::t());
    let cos = alg.embed_smooth(SmoothExpr::cos(SmoothExpr::t()));

    let checks = [
        ("t delta ~= 0", (&t * &d).weak_equal(&alg.zero())),
        ("cos(t) delta ~= delta", (&cos * &d).weak_equal(&d)),
        ("H' ~= delta", alg.heaviside().derive().weak_equal(&d)),
        ("delta(t - s) ~= delta", d.translate(&alg.s())?.weak_equal(&d)),
    ];
    for (name, verdict) in checks {
        println!("{name:<24} {verdict}");
    }
    println!("{:<24} {}", "delta(t - s) ~ delta", d.translate(&alg.s())?.associated(&d)?);
    Ok(())
}
