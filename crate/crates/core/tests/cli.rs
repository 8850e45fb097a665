use lcgf::cli::{parse, parse_equation, run_args, BinOp, Equation, Expr, Func, Relation, Symbol};
use lcgf::lc::Exponent;
use proptest::prelude::*;
use serde_json::Value;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..80).prop_map(|k| Expr::Num(k as f64 / 4.0)),
        prop::sample::select(vec![
            Symbol::S,
            Symbol::I,
            Symbol::T,
            Symbol::Z,
            Symbol::Y(0),
            Symbol::Y(1),
            Symbol::Y(2),
        ])
        .prop_map(Expr::Sym),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            (inner.clone(), -6i64..=6, 1i64..=4).prop_map(|(a, p, q)| Expr::Pow(Box::new(a), Exponent::ratio(p, q))),
            (
                prop::sample::select(vec![
                    Func::Sin,
                    Func::Cos,
                    Func::Exp,
                    Func::H,
                    Func::Delta,
                    Func::DeltaN(0),
                    Func::DeltaN(3)
                ]),
                inner
            )
                .prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn equations_round_trip(
        lhs in expr(),
        rhs in expr(),
        relation in prop::sample::select(vec![Relation::Weak, Relation::Exact, Relation::Associated]),
    ) {
        let eq = Equation { lhs, relation, rhs };
        prop_assert_eq!(parse_equation(&eq.to_string()).unwrap(), eq);
    }

    #[test]
    fn parser_never_panics(text in "[-+*/^()0-9a-zA-Z_ ,.'~=]{0,40}") {
        let _ = parse(&text);
        let _ = parse_equation(&text);
    }
}

fn run(args: &[&str]) -> lcgf::cli::Outcome {
    run_args(std::iter::once("lcgf").chain(args.iter().copied()))
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut v: Vec<&str> = args.to_vec();
    v.extend(["--format", "machine"]);
    let out = run(&v);
    (out.code, serde_json::from_str(&out.stdout).expect("machine output is JSON"))
}

#[test]
fn geometric_series() {
    let out = run(&["lc-eval", "1/(1 - s)", "--trunc", "4"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("1 + s + s^2 + s^3 + s^4"), "{}", out.stdout);
}

#[test]
fn number_records() {
    let (code, doc) = machine(&["lc-eval", "1 + 2*s"]);
    assert_eq!(code, 0);
    let expected: Value = serde_json::from_str(r#"[{"exp":"0","re":1,"im":0},{"exp":"1","re":2,"im":0}]"#).unwrap();
    assert_eq!(doc["result"]["value"], expected);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["options"]["seed"], 0);
}

#[test]
fn solve_ivp_with_shifted_kick() {
    let out = run(&["solve-ivp", "y'' + y ~= delta(t - 2*s)", "--y0", "0", "--yp0", "1"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("sin(t) + H(t - 2*s)*sin(t - 2*s)"), "{}", out.stdout);
    assert!(out.stdout.contains("PASS"), "{}", out.stdout);
}

#[test]
fn naive_audit_is_inconsistent() {
    let out = run(&["audit", "y'' + y = delta(t)", "--y0", "0", "--yp0", "1", "--ruleset", "naive"]);
    assert_eq!(out.code, 3, "{}", out.stdout);
    assert!(out.stdout.contains("y′(0₊): expected 1, obtained 2"), "{}", out.stdout);
    assert!(out.stdout.contains("L[f″] = z²L[f] − zf(0) − f′(0)"), "{}", out.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["laplace", "delta(t)"]).code, 2);
    assert_eq!(run(&["laplace", "delta(t - 2*s)"]).code, 0);
    assert_eq!(run(&["lc-eval", "sin(s"]).code, 1);
    assert_eq!(run(&["lc-eval"]).code, 1);
    assert_eq!(run(&["no-such-verb"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
    // s is the fixed scale, never the transform variable
    assert_eq!(run(&["laplace", "1/(s + 1)", "--inverse"]).code, 1);
}

#[test]
fn syntax_errors_carry_positions() {
    let (code, doc) = machine(&["lc-eval", "1 + * 2"]);
    assert_eq!(code, 1);
    let message = doc["result"]["error"]["message"].as_str().unwrap();
    assert!(message.contains("line 1, column 5"), "{message}");
}

#[test]
fn machine_output_is_deterministic() {
    let cases: [&[&str]; 4] = [
        &["gf-pair", "H(t)*delta(t)", "--seed", "7"],
        &["gf-check", "H(t)^2 ~ H(t)"],
        &["laplace", "H(t - 2*s)*sin(t - 2*s)"],
        &["audit", "y'' + y = delta(t)", "--yp0", "1", "--ruleset", "engineer"],
    ];
    for args in cases {
        let mut v = args.to_vec();
        v.extend(["--format", "machine"]);
        let (a, b) = (run(&v), run(&v));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn seed_falls_back_to_environment() {
    std::env::set_var("LCGF_SEED", "11");
    let (_, doc) = machine(&["gf-pair", "delta(t)", "--tau", "0"]);
    std::env::remove_var("LCGF_SEED");
    assert_eq!(doc["options"]["seed"], 11);
}

#[test]
fn mollifier_dump_has_requested_nodes() {
    let (code, doc) = machine(&["mollifier-dump"]);
    assert_eq!(code, 0);
    let samples = doc["result"]["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 1001);
    assert_eq!(samples[0][0], -1.0);
    assert_eq!(samples[1000][0], 1.0);
}

#[test]
fn binary_reports_exit_status() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_lcgf"))
        .args(["audit", "y'' + y = delta(t)", "--y0", "0", "--yp0", "1", "--ruleset", "naive"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stdout).contains("expected 1, obtained 2"));
}
