use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lcgf::gf::{Algebra, GenFunction, GfSettings, Verdict, Weight};
use lcgf::laplace::{
    audit_classical, solve_ivp, transform, transform_generalized, AuditSpec, AuditVerdict, ClassicalFn,
    DomainElement, EqualityMode, IvpSpec, RhsAtom, Ruleset,
};
use lcgf::lc::{Exponent, LcComplex, LcReal, TruncationContext, Valuation};
use lcgf::smooth::SmoothExpr;
use lcgf::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lc<T>(r: lcgf::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn algebra() -> Algebra {
    Algebra::new(GfSettings::default()).expect("default algebra")
}

/// Canonical random series: distinct exponents p/q in a window, coefficients
/// bounded away from zero.
fn random_lc(rng: &mut ChaCha8Rng, ctx: &TruncationContext, lo: i64) -> LcReal {
    let n = rng.random_range(1..=4);
    let terms = (0..n)
        .map(|_| {
            let q = rng.random_range(1..=3);
            let p = rng.random_range(lo * q..=6 * q);
            let mag = rng.random_range(0.1..10.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (Exponent::ratio(p, q), sign * mag)
        })
        .collect();
    LcReal::new(terms, ctx)
}

fn c1_valuation_law() -> Outcome {
    let ctx = TruncationContext::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..10_000 {
        let (x, y) = (random_lc(&mut rng, &ctx, -3), random_lc(&mut rng, &ctx, -3));
        let (vx, vy) = (x.valuation(), y.valuation());
        let expected = vx.add(&vy);
        // a product whose valuation exceeds q_max truncates to zero
        let expected = match expected.finite() {
            Some(e) if e > &ctx.q_max => Valuation::Infinite,
            _ => expected,
        };
        if (&x * &y).valuation() != expected || (&x + &y).valuation() < vx.clone().min(vy) {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok("10000 pairs, 0 failures".into())
}

fn c2_ultrametric() -> Outcome {
    let ctx = TruncationContext::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let d = |a: &LcReal, b: &LcReal| (a - b).valuation().ultra_norm();
    let mut failures = 0;
    for _ in 0..10_000 {
        let (x, y, z) = (
            random_lc(&mut rng, &ctx, -3),
            random_lc(&mut rng, &ctx, -3),
            random_lc(&mut rng, &ctx, -3),
        );
        // exact on valuations: v(x - z) >= min(v(x - y), v(y - z))
        let exact = (&x - &z).valuation() >= (&x - &y).valuation().min((&y - &z).valuation());
        if !exact || d(&x, &z) > d(&x, &y).max(d(&y, &z)) {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok("10000 triples, 0 failures".into())
}

/// First exponent where `r² - x` exceeds f64 round-off. Round-off in `r²`
/// scales with the coefficients of `|r|²`, not with those of `x`.
fn residual(square: &LcReal, x: &LcReal, r: &LcReal) -> Valuation {
    let abs = LcReal::new(r.terms().iter().map(|(e, c)| (e.clone(), c.abs())).collect(), r.ctx());
    let scale = (&abs * &abs).max_abs_coefficient().max(x.max_abs_coefficient());
    (square - x)
        .terms()
        .iter()
        .find(|(_, c)| c.abs() > 1e-9 * scale)
        .map(|(e, _)| Valuation::Finite(e.clone()))
        .unwrap_or(Valuation::Infinite)
}

fn c3_root_round_trip() -> Outcome {
    let ctx = TruncationContext::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = Valuation::Infinite;
    for _ in 0..1000 {
        let mut x = random_lc(&mut rng, &ctx, 0);
        if x.signum() < 0 {
            x = -&x;
        }
        let r = lc(x.nth_root(2))?;
        let v = residual(&lc(r.powi(2))?, &x, &r);
        let beyond = match v.finite() {
            Some(e) => e > &ctx.q_max,
            None => true,
        };
        ensure(beyond, || format!("sqrt({x})^2 has residual valuation {v}"))?;
        worst = worst.min(v);
    }
    Ok(format!("1000 values, smallest residual valuation {worst}"))
}

/// `Σ_k τ^(k)(0)/k! (2s)^k`, built term by term.
fn taylor_at_two_s(tau: &dyn Weight, ctx: &TruncationContext) -> LcComplex {
    let order = ctx.q_max.to_f64().floor() as usize;
    tau.taylor(0.0, order)
        .iter()
        .enumerate()
        .fold(LcComplex::zero(ctx), |acc, (k, c)| {
            &acc + &LcComplex::monomial(Exponent::integer(k as i64), c * 2f64.powi(k as i32), ctx)
        })
}

fn c4_pairing_exactness() -> Outcome {
    let alg = algebra();
    let psi = lc(alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0)))?;
    let battery = alg.battery();
    let mut worst: f64 = 0.0;
    for tau in &battery {
        let p = lc(psi.pairing(tau))?;
        worst = worst.max(p.max_abs_diff(&taylor_at_two_s(tau, alg.ctx())));
    }
    ensure(worst <= 1e-8, || format!("largest coefficient gap {worst:e}"))?;
    Ok(format!("{} test functions, largest gap {worst:.1e}", battery.len()))
}

fn c5_heaviside_products() -> Outcome {
    let alg = algebra();
    let (h, d) = (alg.heaviside(), alg.delta(0.0, 0));
    let hd = &h * &d;
    let zero = Exponent::zero();
    let mut worst: f64 = 0.0;
    for tau in alg.battery() {
        let p = lc(hd.pairing(&tau))?;
        ensure(p.valuation() >= Valuation::Finite(zero.clone()), || format!("<Hδ, τ> = {p} is infinite"))?;
        worst = worst.max((p.coefficient(&zero) - tau.value(0.0) / 2.0).norm());
        for n in [2, 3] {
            let diff = lc(h.powi(n).pairing(&tau))? - lc(h.pairing(&tau))?;
            ensure(diff.valuation() >= Valuation::Finite(zero.clone()), || format!("<H^{n} - H, τ> = {diff}"))?;
            worst = worst.max(diff.coefficient(&zero).norm());
        }
    }
    ensure(worst <= 1e-8, || format!("largest s^0 gap {worst:e}"))?;
    Ok(format!("Hδ ∼ δ/2, H² ∼ H, H³ ∼ H; largest s^0 gap {worst:.1e}"))
}

/// `∫ φ²` by composite Simpson on a fine grid, independent of the crate's quadrature.
fn simpson_phi_squared(alg: &Algebra) -> f64 {
    let phi = alg.mollifier();
    let n = 200_000;
    let h = 2.0 / n as f64;
    let f = |x: f64| phi.value(x).powi(2);
    let mut sum = f(-1.0) + f(1.0);
    for k in 1..n {
        let x = -1.0 + k as f64 * h;
        sum += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    sum * h / 3.0
}

fn c6_delta_norm() -> Outcome {
    let alg = algebra();
    let d = alg.delta(0.0, 0);
    let n2 = lc((&d * &d).integral_compact())?;
    let minus_one = Exponent::integer(-1);
    ensure(n2.valuation() == Valuation::Finite(minus_one.clone()), || format!("valuation {}", n2.valuation()))?;
    let lead = n2.coefficient(&minus_one);
    let oracle = simpson_phi_squared(&alg);
    ensure((lead.re - oracle).abs() <= 1e-8 && lead.im == 0.0, || {
        format!("leading coefficient {lead} vs ∫φ² = {oracle}")
    })?;
    let norm = lc(n2.re().nth_root(2))?;
    ensure(!norm.is_zero() && !norm.is_finite(), || format!("‖δ‖₂ = {norm}"))?;
    Ok(format!("∫δ² = {n2}, ∫φ² = {oracle:.12}, ‖δ‖₂ = {norm}"))
}

/// `e^{-zt}` as a weight; only its Taylor data near the support of the atom matter.
struct ExpWeight(Complex64);

impl Weight for ExpWeight {
    fn taylor(&self, at: f64, order: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(order + 1);
        let mut c = (-self.0 * at).exp();
        for k in 0..=order {
            out.push(c);
            c *= -self.0 / (k + 1) as f64;
        }
        out
    }

    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
}

fn c7_laplace_identity() -> Outcome {
    let alg = algebra();
    let ctx = alg.ctx();
    let psi = lc(alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0)))?;
    let img = lc(transform_generalized(&psi))?;
    ensure(img.terms.len() == 1, || format!("image {img}"))?;
    let t = &img.terms[0];
    let symbolic = t.num.degree() == Some(0)
        && t.den.degree() == Some(0)
        && t.num.coeff(0).approx_eq(&t.den.coeff(0), 1e-14)
        && t.shift.approx_eq(&alg.s().scale_by(2.0), 0.0);
    ensure(symbolic, || format!("image {img} is not e^(-2sz)"))?;
    let mut worst: f64 = 0.0;
    for z in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)] {
        let from_image = lc(img.eval(&LcComplex::constant(z, ctx)))?;
        let from_pairing = lc(psi.pairing(&ExpWeight(z)))?;
        for k in 0..=4 {
            let e = Exponent::integer(k);
            // (-2z)^k / k!
            let oracle = (-2.0 * z).powi(k as i32) / (1..=k).product::<i64>().max(1) as f64;
            worst = worst
                .max((from_image.coefficient(&e) - from_pairing.coefficient(&e)).norm())
                .max((from_image.coefficient(&e) - oracle).norm());
        }
    }
    ensure(worst <= 1e-8, || format!("largest coefficient gap {worst:e}"))?;
    Ok(format!("image {img}; z ∈ {{1, 2, 1+i}} through s^4, largest gap {worst:.1e}"))
}

fn ivp(alg: &Algebra, yp0: f64) -> lcgf::Result<lcgf::laplace::IvpSolution> {
    let ctx = alg.ctx();
    let kick = alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0))?;
    let spec = IvpSpec {
        a2: 1.0,
        a1: 0.0,
        a0: 1.0,
        rhs: DomainElement::generalized(LcComplex::one(ctx), kick),
        y0: LcComplex::zero(ctx),
        yp0: LcComplex::constant(Complex64::new(yp0, 0.0), ctx),
        mode: EqualityMode::Weak,
    };
    solve_ivp(&spec, alg)
}

fn c8_ivp() -> Outcome {
    let alg = algebra();
    let ctx = alg.ctx();
    let mut notes = Vec::new();
    for (yp0, expected) in [(1.0, "sin(t) + H(t - 2*s)*sin(t - 2*s)"), (0.0, "H(t - 2*s)*sin(t - 2*s)")] {
        let sol = lc(ivp(&alg, yp0))?;
        ensure(sol.solution.to_string() == expected, || format!("solution {}", sol.solution))?;
        let y0_gap = sol.y0_obtained.max_abs_coefficient();
        let yp = sol.yp0_obtained.clone().ok_or("no y'(0)")?;
        let yp_gap = yp.max_abs_diff(&LcComplex::constant(Complex64::new(yp0, 0.0), ctx));
        ensure(y0_gap <= 1e-12 && yp_gap <= 1e-12, || format!("y(0) = {}, y'(0) = {yp}", sol.y0_obtained))?;
        ensure(sol.equation == Verdict::True, || format!("weak verification {}", sol.equation))?;
        notes.push(format!("y = {expected} (y(0) gap {y0_gap:.0e}, y'(0) gap {yp_gap:.0e})"));
    }
    Ok(notes.join("; "))
}

fn c9_contradiction() -> Outcome {
    let alg = algebra();
    let ctx = alg.ctx();
    let base = AuditSpec {
        a2: 1.0,
        a1: 0.0,
        a0: 1.0,
        rhs: vec![(LcComplex::one(ctx), RhsAtom::Delta { order: 0, delay: LcReal::zero(ctx) })],
        y0: LcComplex::zero(ctx),
        yp0: LcComplex::one(ctx),
        eps: 0.1,
    };
    let runs = [(Ruleset::Naive, 0.1), (Ruleset::Engineer, 0.1), (Ruleset::Engineer, 0.01)];
    for (ruleset, eps) in runs {
        let report = lc(audit_classical(&AuditSpec { eps, ..base.clone() }, ruleset, &alg))?;
        ensure(report.verdict == AuditVerdict::Inconsistent, || format!("{ruleset:?}: {:?}", report.verdict))?;
        ensure(report.solution == "2*sin(t)", || format!("{ruleset:?}: y = {}", report.solution))?;
        let v = report
            .violations
            .iter()
            .find(|v| v.condition == "y′(0₊)")
            .ok_or_else(|| format!("{ruleset:?}: no y′(0₊) violation"))?;
        let gap = &v.obtained - &v.expected;
        ensure(
            v.obtained.approx_eq(&LcComplex::constant(Complex64::new(2.0, 0.0), ctx), 1e-12)
                && gap.approx_eq(&LcComplex::one(ctx), 1e-12),
            || format!("{ruleset:?}: {v}"),
        )?;
    }
    Ok("naive and engineer (ε = 0.1, 0.01): y = 2 sin t, y′(0₊): expected 1, obtained 2".into())
}

fn c10_domain_gate() -> Outcome {
    let alg = algebra();
    let ctx = alg.ctx();
    let delta = DomainElement::generalized(LcComplex::one(ctx), alg.delta(0.0, 0));
    match transform(&delta, ctx) {
        Err(Error::DomainMembership(_)) => {}
        other => return Err(format!("transform(δ) gave {other:?}")),
    }
    let shifted = lc(alg.delta(0.0, 0).translate(&alg.s().scale_by(2.0)))?;
    let img = lc(transform(&DomainElement::generalized(LcComplex::one(ctx), shifted), ctx))?;
    Ok(format!("transform(δ) rejected; transform(δ(t - 2s)) = {img}"))
}

fn c11_equivalence() -> Outcome {
    let alg = algebra();
    let ctx = alg.ctx();
    let one = || LcComplex::one(ctx);
    let at = |k: f64| alg.s().scale_by(k);
    let kick = |k: f64| -> lcgf::Result<GenFunction> { alg.delta(0.0, 0).translate(&at(k)) };
    let gen = |g: GenFunction| DomainElement::generalized(one(), g);
    let cls = |f: ClassicalFn| DomainElement::classical(one(), f);
    let t = alg.embed_smooth(SmoothExpr::t());
    let cos = alg.embed_smooth(SmoothExpr::cos(SmoothExpr::t()));
    let h = |k: f64| alg.heaviside().translate(&at(k));
    let cos_2s = lc(lcgf::lc::lift_smooth(&SmoothExpr::cos(SmoothExpr::t()), &LcComplex::from_real(at(2.0))))?;

    let cases: Vec<(&str, DomainElement, DomainElement, bool)> = vec![
        ("sin t | sin t", cls(ClassicalFn::sin(1.0)), cls(ClassicalFn::sin(1.0)), true),
        ("sin t | cos t", cls(ClassicalFn::sin(1.0)), cls(ClassicalFn::cos(1.0)), false),
        ("δ(t-2s) | H'(t-2s)", gen(lc(kick(2.0))?), gen(lc(h(2.0))?.derive()), true),
        ("δ(t-2s) | δ(t-3s)", gen(lc(kick(2.0))?), gen(lc(kick(3.0))?), false),
        (
            "δ(t-2s) + (t-2s)δ(t-2s) | δ(t-2s)",
            gen(&lc(kick(2.0))? + &(&(&t - &alg.constant(LcComplex::from_real(at(2.0)))) * &lc(kick(2.0))?)),
            gen(lc(kick(2.0))?),
            true,
        ),
        ("e^-t | e^-2t", cls(ClassicalFn::exp_poly(0, -1.0)), cls(ClassicalFn::exp_poly(0, -2.0)), false),
        ("cos(t)δ(t-2s) | cos(2s)δ(t-2s)", gen(&cos * &lc(kick(2.0))?), gen(lc(kick(2.0))?.scale(&cos_2s)), true),
        ("δ'(t-2s) | δ(t-2s)", gen(lc(alg.delta(0.0, 1).translate(&at(2.0)))?), gen(lc(kick(2.0))?), false),
        (
            "(t-2s)δ'(t-2s) | -δ(t-2s)",
            gen(&(&t - &alg.constant(LcComplex::from_real(at(2.0)))) * &lc(alg.delta(0.0, 1).translate(&at(2.0)))?),
            gen(-&lc(kick(2.0))?),
            true,
        ),
        (
            "sin t + δ(t-2s) | sin t + δ(t-3s)",
            cls(ClassicalFn::sin(1.0)).plus(gen(lc(kick(2.0))?)),
            cls(ClassicalFn::sin(1.0)).plus(gen(lc(kick(3.0))?)),
            false,
        ),
    ];
    let mut agree = 0;
    let mut problems = Vec::new();
    let n = cases.len();
    for (name, f, g, equal) in cases {
        let check = lc(lcgf::laplace::check_transform_equivalence(&f, &g, &alg))?;
        let expected_weak = if equal { Verdict::True } else { Verdict::False };
        if check.agree() && check.weak == expected_weak {
            agree += 1;
        } else {
            problems.push(format!("{name}: weak {}, images equal {}", check.weak, check.images_equal));
        }
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    Ok(format!("{agree}/{n} pairs agree"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("valuation law", c1_valuation_law),
        ("ultrametric inequality", c2_ultrametric),
        ("square-root round trip", c3_root_round_trip),
        ("shifted delta pairing", c4_pairing_exactness),
        ("Heaviside products", c5_heaviside_products),
        ("L2 norm of delta", c6_delta_norm),
        ("transform of delta(t - 2s)", c7_laplace_identity),
        ("IVP resolution", c8_ivp),
        ("classical contradiction", c9_contradiction),
        ("transform domain gate", c10_domain_gate),
        ("weak equality vs transform equality", c11_equivalence),
    ];
    let mut failed = 0;
    let start = Instant::now();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
