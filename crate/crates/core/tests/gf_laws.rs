use lcgf::gf::{Algebra, GenFunction, GfSettings, TestFunction, Verdict, Weight};
use lcgf::lc::{LcComplex, LcReal};
use lcgf::smooth::SmoothExpr;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn alg() -> &'static Algebra {
    static ALG: OnceLock<Algebra> = OnceLock::new();
    ALG.get_or_init(|| Algebra::new(GfSettings::default()).unwrap())
}

fn tau(k: usize) -> TestFunction {
    alg().battery()[k % 32].clone()
}

/// `w'`, read off the Taylor data of `w`.
struct Derivative<'a>(&'a dyn Weight);

impl Weight for Derivative<'_> {
    fn taylor(&self, at: f64, order: usize) -> Vec<Complex64> {
        let jet = self.0.taylor(at, order + 1);
        (0..=order).map(|k| jet[k + 1] * (k + 1) as f64).collect()
    }

    fn support(&self) -> (f64, f64) {
        self.0.support()
    }
}

/// An atom centred at `c s` with standard offset `x0`.
fn atom(kind: u8, x0: f64, c: f64) -> GenFunction {
    let a = alg();
    let base = match kind {
        0 => a.delta(0.0, 0),
        1 => a.delta(0.0, 1),
        2 => a.heaviside(),
        _ => a.embed_smooth(SmoothExpr::sin(SmoothExpr::t())),
    };
    base.translate(&(&a.s().scale_by(c) + &LcReal::constant(x0, a.ctx()))).unwrap()
}

fn gen_fn() -> impl Strategy<Value = GenFunction> {
    (0u8..4, prop::sample::select(vec![-0.5, 0.0, 0.25]), -3i8..=3).prop_map(|(k, x0, c)| atom(k, x0, c as f64))
}

fn close(a: &LcComplex, b: &LcComplex) -> bool {
    a.max_abs_diff(b) <= 1e-9 * a.max_abs_coefficient().max(b.max_abs_coefficient()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pairing_is_linear(f in gen_fn(), g in gen_fn(), a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0usize..32) {
        let t = tau(k);
        let ctx = alg().ctx();
        let (ca, cb) = (LcComplex::constant(a.into(), ctx), LcComplex::constant(b.into(), ctx));
        let lhs = (&f.scale(&ca) + &g.scale(&cb)).pairing(&t).unwrap();
        let rhs = &(&ca * &f.pairing(&t).unwrap()) + &(&cb * &g.pairing(&t).unwrap());
        prop_assert!(close(&lhs, &rhs), "{lhs} vs {rhs}");
    }

    #[test]
    fn translations_compose(f in gen_fn(), h1 in -2i8..=2, h2 in -2i8..=2, k in 0usize..32) {
        let s = alg().s();
        let t = tau(k);
        let (a, b) = (s.scale_by(h1 as f64), s.scale_by(h2 as f64));
        let stepwise = f.translate(&a).unwrap().translate(&b).unwrap().pairing(&t).unwrap();
        let direct = f.translate(&(&a + &b)).unwrap().pairing(&t).unwrap();
        prop_assert!(close(&stepwise, &direct));
    }

    #[test]
    fn derivative_is_adjoint(f in gen_fn(), k in 0usize..32) {
        let t = tau(k);
        let lhs = f.derive().pairing(&t).unwrap();
        let rhs = -&f.pairing(&Derivative(&t)).unwrap();
        prop_assert!(close(&lhs, &rhs), "<{f}', τ> = {lhs}, -<{f}, τ'> = {rhs}");
    }

    #[test]
    fn products_commute(f in gen_fn(), g in gen_fn(), k in 0usize..32) {
        let t = tau(k);
        prop_assert!(close(&(&f * &g).pairing(&t).unwrap(), &(&g * &f).pairing(&t).unwrap()));
    }

    #[test]
    fn weak_equality_is_reflexive(f in gen_fn()) {
        prop_assert_eq!(f.weak_equal(&f.clone()), Verdict::True);
    }
}

#[test]
fn heaviside_derivative_is_delta() {
    let a = alg();
    assert_eq!(a.heaviside().derive().weak_equal(&a.delta(0.0, 0)), Verdict::True);
}

#[test]
fn distinct_deltas_differ() {
    let a = alg();
    let d = a.delta(0.0, 0);
    let shifted = d.translate(&a.s()).unwrap();
    assert_eq!(d.weak_equal(&shifted), Verdict::False);
    assert!(d.associated(&shifted).unwrap());
}

#[test]
fn smooth_embedding_pairs_classically() {
    let a = alg();
    let sin = a.embed_smooth(SmoothExpr::sin(SmoothExpr::t()));
    let t = tau(3);
    let p = sin.pairing(&t).unwrap();
    // a standard smooth function pairs to a standard number
    assert!(p.exponents().iter().all(|e| e.is_zero()), "{p}");
}
