//! The valuation is multiplicative and the induced distance
//! `d(x, y) = e^{-v(x - y)}` satisfies the strong triangle inequality.

use lcgf::lc::{Exponent, LcReal, TruncationContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rng: &mut ChaCha8Rng, ctx: &TruncationContext) -> LcReal {
    let terms = (0..rng.random_range(1..4))
        .map(|_| {
            let q = Exponent::ratio(rng.random_range(-4..12), rng.random_range(1..4));
            (q, rng.random_range(-3.0..3.0))
        })
        .collect();
    LcReal::new(terms, ctx)
}

fn main() {
    let ctx = TruncationContext::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut products, mut sums, mut triangles) = (0, 0, 0);
    let n = 2000;
    for _ in 0..n {
        let (x, y, z) = (random(&mut rng, &ctx), random(&mut rng, &ctx), random(&mut rng, &ctx));
        if (&x * &y).valuation() == x.valuation().add(&y.valuation()) || (&x * &y).is_zero() {
            products += 1;
        }
        if (&x + &y).valuation() >= x.valuation().min(y.valuation()) {
            sums += 1;
        }
        let d = |a: &LcReal, b: &LcReal| (a - b).valuation().ultra_norm();
        if d(&x, &z) <= d(&x, &y).max(d(&y, &z)) {
            triangles += 1;
        }
    }
    println!("v(xy) = v(x) + v(y)          : {products}/{n}");
    println!("v(x + y) >= min(v(x), v(y))  : {sums}/{n}");
    println!("d(x,z) <= max(d(x,y), d(y,z)): {triangles}/{n}");
}
