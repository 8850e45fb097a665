use lcgf::lc::{Exponent, LcComplex, LcReal, TruncationContext, Valuation};
use num_complex::Complex64;
use proptest::prelude::*;
use std::cmp::Ordering;

fn ctx() -> TruncationContext {
    TruncationContext::default()
}

prop_compose! {
    fn term(lo: i64)(q in 1i64..=3, p in 0i64..=30, mag in 0.1f64..10.0, neg in any::<bool>()) -> (Exponent, f64) {
        let p = lo * q + p % ((6 - lo) * q + 1);
        (Exponent::ratio(p, q), if neg { -mag } else { mag })
    }
}

fn series(lo: i64) -> impl Strategy<Value = LcReal> {
    prop::collection::vec(term(lo), 1..=4).prop_map(|t| LcReal::new(t, &ctx()))
}

fn close(a: &LcReal, b: &LcReal) -> bool {
    let scale = a.max_abs_coefficient().max(b.max_abs_coefficient()).max(1.0);
    a.max_abs_diff(b) <= 1e-10 * scale
}

fn abs(x: &LcReal) -> LcReal {
    LcReal::new(x.terms().iter().map(|(e, c)| (e.clone(), c.abs())).collect(), x.ctx())
}

/// `a ≈ b` where both were computed from products of the factors; round-off
/// scales with the product of their absolute values.
fn close_product(a: &LcReal, b: &LcReal, factors: &[&LcReal]) -> bool {
    let cond = factors.iter().fold(LcReal::one(&ctx()), |acc, f| &acc * &abs(f));
    let scale = cond.max_abs_coefficient().max(a.max_abs_coefficient()).max(b.max_abs_coefficient()).max(1.0);
    a.max_abs_diff(b) <= 1e-10 * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_laws(x in series(-2), y in series(-2), z in series(-2)) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert!(close(&(&x * &y), &(&y * &x)));
        prop_assert!(close(&(&(&x + &y) + &z), &(&x + &(&y + &z))));
        prop_assert!(close(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x - &x).is_zero());
    }

    // With a negative valuation present, an intermediate product can leave
    // the window and be dropped, so associativity is only asked of v >= 0.
    #[test]
    fn multiplication_associates(x in series(0), y in series(0), z in series(0)) {
        prop_assert!(close(&(&(&x * &y) * &z), &(&x * &(&y * &z))));
    }

    #[test]
    fn valuation_is_additive(x in series(-3), y in series(-3)) {
        let v = x.valuation().add(&y.valuation());
        let product = (&x * &y).valuation();
        match v.finite() {
            Some(e) if e > &ctx().q_max => prop_assert_eq!(product, Valuation::Infinite),
            _ => prop_assert_eq!(product, v),
        }
    }

    #[test]
    fn inverse_round_trip(x in series(0)) {
        let inv = x.invert().unwrap();
        let one = &x * &inv;
        prop_assert!(close_product(&one, &LcReal::one(&ctx()), &[&x, &inv]), "{x}: {one}");
    }

    #[test]
    fn order_is_total_and_compatible(x in series(-2), y in series(-2), z in series(-2)) {
        let xy = x.compare(&y).unwrap();
        prop_assert_eq!(y.compare(&x).unwrap(), xy.reverse());
        if xy == Ordering::Less && y.compare(&z).unwrap() == Ordering::Less {
            prop_assert_eq!(x.compare(&z).unwrap(), Ordering::Less);
        }
        // x < y implies x + z < y + z
        prop_assert_eq!((&x + &z).compare(&(&y + &z)).unwrap(), xy);
    }

    #[test]
    fn odd_roots_invert_powers(x in series(0), n in prop::sample::select(vec![3u32, 5])) {
        let r = x.nth_root(n).unwrap();
        let factors = vec![&r; n as usize];
        prop_assert!(close_product(&r.powi(n as i64).unwrap(), &x, &factors));
    }

    #[test]
    fn finite_values_split(x in series(0)) {
        let st = x.standard_part().unwrap();
        let rest = x.infinitesimal_part().unwrap();
        prop_assert!(rest.is_infinitesimal() || rest.is_zero());
        prop_assert!(close(&(&LcReal::constant(st, &ctx()) + &rest), &x));
    }

    #[test]
    fn complex_modulus_is_multiplicative(a in series(0), b in series(0), c in series(0), d in series(0)) {
        let u = LcComplex::new(a, b).unwrap();
        let w = LcComplex::new(c, d).unwrap();
        let norm = |v: &LcComplex| (v * &v.conj()).re().clone();
        prop_assert!(close(&norm(&(&u * &w)), &(&norm(&u) * &norm(&w))));
    }

    #[test]
    fn records_round_trip(a in series(-2), b in series(-2)) {
        let u = LcComplex::new(a, b).unwrap();
        prop_assert_eq!(LcComplex::from_records(&u.to_records(), &ctx()).unwrap(), u);
    }
}

#[test]
fn scale_is_positive_infinitesimal() {
    let s = LcReal::scale(&ctx());
    assert_eq!(s.signum(), 1);
    assert!(s.is_infinitesimal());
    assert!(s.compare(&LcReal::constant(1e-20, &ctx())).unwrap() == Ordering::Less);
    assert_eq!(s.invert().unwrap().valuation(), Valuation::Finite(Exponent::integer(-1)));
}

#[test]
fn i_squared_is_minus_one() {
    let i = LcComplex::i(&ctx());
    assert!((&i * &i).approx_eq(&LcComplex::constant(Complex64::new(-1.0, 0.0), &ctx()), 0.0));
}
