use lcgf::gf::{Algebra, GfSettings, Verdict};
use lcgf::laplace::{
    inverse_transform, solve_ivp, transform, transform_classical, transform_derivative_shifted, ClassicalFn,
    DomainElement, EqualityMode, IvpSpec, Oscillation,
};
use lcgf::lc::LcComplex;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn alg() -> &'static Algebra {
    static ALG: OnceLock<Algebra> = OnceLock::new();
    ALG.get_or_init(|| Algebra::new(GfSettings::default()).unwrap())
}

fn classical() -> impl Strategy<Value = ClassicalFn> {
    (
        0u32..=2,
        prop::sample::select(vec![-2.0, -1.0, -0.5, 0.0, 1.0]),
        prop::sample::select(vec![1.0, 2.0, 3.0]),
        prop::sample::select(vec![Oscillation::One, Oscillation::Sin, Oscillation::Cos]),
    )
        .prop_map(|(power, alpha, omega, osc)| match osc {
            Oscillation::One => ClassicalFn::exp_poly(power, alpha),
            Oscillation::Sin => ClassicalFn::sin(omega).with_exp(alpha).with_power(power),
            Oscillation::Cos => ClassicalFn::cos(omega).with_exp(alpha).with_power(power),
        })
}

fn element() -> impl Strategy<Value = DomainElement> {
    prop::collection::vec((classical(), -3.0f64..3.0), 1..=3).prop_map(|parts| {
        let ctx = alg().ctx();
        parts.into_iter().fold(DomainElement::default(), |acc, (f, c)| {
            acc.plus(DomainElement::classical(LcComplex::constant(c.into(), ctx), f))
        })
    })
}

fn value_at(f: &DomainElement, t: f64) -> Complex64 {
    f.classical
        .iter()
        .map(|(c, g)| c.standard_part().unwrap() * g.expr().eval_real(t).unwrap())
        .sum()
}

/// `∫_0^T e^{-zt} f(t) dt` by composite Simpson, with `T` large enough that the tail is negligible.
fn laplace_quadrature(f: &DomainElement, z: f64) -> Complex64 {
    let (end, n) = (80.0, 40_000);
    let h = end / n as f64;
    let g = |t: f64| value_at(f, t) * (-z * t).exp();
    let mut sum = g(0.0) + g(end);
    for k in 1..n {
        sum += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_transform(f in element()) {
        let img = transform(&f, alg().ctx()).unwrap();
        let back = inverse_transform(&img, alg()).unwrap();
        prop_assert!(back.generalized.is_empty());
        for t in [0.0, 0.3, 1.1, 2.5] {
            let (a, b) = (value_at(&f, t), value_at(&back, t));
            prop_assert!((a - b).norm() <= 1e-8 * a.norm().max(1.0), "t = {t}: {a} vs {b} for {back}");
        }
        prop_assert!(transform(&back, alg().ctx()).unwrap().equals(&img));
    }

    #[test]
    fn image_matches_the_integral(f in element()) {
        let z = 4.0;
        let img = transform(&f, alg().ctx()).unwrap();
        let at = img.eval(&LcComplex::constant(z.into(), alg().ctx())).unwrap().standard_part().unwrap();
        let oracle = laplace_quadrature(&f, z);
        prop_assert!((at - oracle).norm() <= 1e-8 * oracle.norm().max(1.0), "{img} at {z}: {at} vs {oracle}");
    }
}

#[test]
fn shifted_delta_derivatives() {
    let a = alg();
    for n in 0..4 {
        let psi = a.delta(0.0, n).translate(&a.s().scale_by(2.0)).unwrap();
        let img = transform(&DomainElement::generalized(LcComplex::one(a.ctx()), psi), a.ctx()).unwrap();
        assert!(img.equals(&transform_derivative_shifted(n, a.ctx())), "n = {n}: {img}");
    }
}

#[test]
fn delay_multiplies_by_exponential() {
    let a = alg();
    let delayed = ClassicalFn::sin(1.0).delayed(a.s().scale_by(2.0));
    let img = transform_classical(&delayed, a.ctx()).unwrap();
    assert_eq!(img.to_string(), "1/(z^2 + 1)*e^(-2*s*z)");
}

#[test]
fn homogeneous_oscillator() {
    let a = alg();
    let ctx = a.ctx();
    let spec = IvpSpec {
        a2: 1.0,
        a1: 0.0,
        a0: 4.0,
        rhs: DomainElement::default(),
        y0: LcComplex::one(ctx),
        yp0: LcComplex::zero(ctx),
        mode: EqualityMode::Weak,
    };
    let sol = solve_ivp(&spec, a).unwrap();
    assert_eq!(sol.solution.to_string(), "cos(2*t)");
    assert_eq!(sol.equation, Verdict::True);
}
