//! The expression language and command dispatcher behind the `lcgf` binary.
//!
//! ```
//! use lcgf::cli::run_args;
//!
//! let out = run_args(["lcgf", "lc-eval", "1/(1 - s)", "--trunc", "4"]);
//! assert_eq!(out.code, 0);
//! assert!(out.stdout.contains("1 + s + s^2 + s^3 + s^4"));
//! ```

pub mod ast;
pub mod eval;
pub mod parse;

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Algebra, GfSettings, Verdict};
use crate::laplace::{audit_classical, inverse_transform, solve_ivp, transform, AuditSpec, AuditVerdict, EqualityMode, IvpSpec, Ruleset};
use crate::lc::{Exponent, LcComplex, TruncationContext};
use crate::quad::QuadratureScheme;

pub use ast::{BinOp, Equation, Expr, Func, Relation, Symbol};
pub use parse::{parse, parse_equation};

/// Version of the machine-readable output layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Options {
    /// Largest kept exponent of s, as an integer or p/q.
    #[arg(long, global = true, default_value = "6")]
    pub trunc: String,
    /// Number of vanishing mollifier moments.
    #[arg(long, global = true, default_value_t = 2)]
    pub moment_order: usize,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub quad_tol: f64,
    /// Number of random test functions.
    #[arg(long, global = true, default_value_t = 32)]
    pub battery: usize,
    #[arg(long, global = true, env = "LCGF_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    #[serde(skip)]
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trunc: "6".into(),
            moment_order: 2,
            quad_tol: 1e-12,
            battery: 32,
            seed: 0,
            format: Format::Text,
        }
    }
}

impl Options {
    /// Validates the options and builds the matching algebra settings.
    pub fn settings(&self) -> Result<GfSettings> {
        let q_max: Exponent = self
            .trunc
            .parse()
            .map_err(|_| Error::Options(format!("--trunc expects a rational, got {:?}", self.trunc)))?;
        if self.battery == 0 {
            return Err(Error::Options("--battery must be at least 1".into()));
        }
        Ok(GfSettings {
            ctx: TruncationContext::with_q_max(q_max)?,
            moment_order: self.moment_order,
            quad: QuadratureScheme::with_tol(self.quad_tol)?,
            battery_size: self.battery,
            seed: self.seed,
        })
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Verb {
    /// Evaluate an expression in s and i.
    LcEval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Pair a generalized function with the test battery.
    GfPair {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Pair with one battery member only.
        #[arg(long)]
        tau: Option<usize>,
    },
    /// Decide `f ~= g`, `f = g` or `f ~ g`.
    GfCheck {
        #[arg(allow_hyphen_values = true)]
        relation: String,
    },
    /// Transform a time-domain expression, or invert an image in z.
    Laplace {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Solve `a2 y'' + a1 y' + a0 y ~= rhs` (or `=`).
    SolveIvp {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        #[arg(long, default_value = "0")]
        y0: String,
        #[arg(long, default_value = "0")]
        yp0: String,
    },
    /// Replay a transform table on an IVP and report violated initial conditions.
    Audit {
        #[arg(allow_hyphen_values = true)]
        equation: String,
        #[arg(long, default_value = "0")]
        y0: String,
        #[arg(long, default_value = "0")]
        yp0: String,
        #[arg(long, default_value = "naive")]
        ruleset: String,
        /// Delay substituted for delta(t) by the engineer ruleset.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Sample the mollifier at uniform nodes on [-1, 1].
    MollifierDump {
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::LcEval { .. } => "lc-eval",
            Verb::GfPair { .. } => "gf-pair",
            Verb::GfCheck { .. } => "gf-check",
            Verb::Laplace { .. } => "laplace",
            Verb::SolveIvp { .. } => "solve-ivp",
            Verb::Audit { .. } => "audit",
            Verb::MollifierDump { .. } => "mollifier-dump",
        }
    }

    fn input(&self) -> String {
        match self {
            Verb::LcEval { expr } | Verb::GfPair { expr, .. } | Verb::Laplace { expr, .. } => expr.clone(),
            Verb::GfCheck { relation } => relation.clone(),
            Verb::SolveIvp { equation, .. } | Verb::Audit { equation, .. } => equation.clone(),
            Verb::MollifierDump { .. } => String::new(),
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "lcgf", version, about = "Levi-Civita generalized functions and their Laplace transform")]
pub struct Command {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub options: Options,
}

/// What a command produced: rows for the text table plus a structured result.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<(String, String)>,
    pub result: serde_json::Map<String, Value>,
    pub status: i32,
}

impl Report {
    fn row(&mut self, key: impl Into<String>, value: impl ToString) {
        self.rows.push((key.into(), value.to_string()));
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.result
            .insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }
}

/// Exit status and rendered output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::Options(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::Options(_) => "options",
        Error::DomainMembership(_) => "domain-membership",
        Error::Unsupported(_) => "unsupported",
        Error::Support(_) => "support",
        _ => "domain",
    }
}

fn scalar(text: &str, ctx: &TruncationContext) -> Result<LcComplex> {
    eval::eval_lc(&parse(text)?, ctx)
}

fn lc_eval(expr: &str, alg: &Algebra, r: &mut Report) -> Result<()> {
    let v = scalar(expr, alg.ctx())?;
    r.row("value", &v);
    r.row("valuation", v.valuation());
    r.put("value", &v);
    r.put("valuation", v.valuation().to_string());
    Ok(())
}

fn gf_pair(expr: &str, tau: Option<usize>, alg: &Algebra, r: &mut Report) -> Result<()> {
    let f = eval::eval_gen(&parse(expr)?, alg)?;
    r.row("parsed", &f);
    let battery = alg.battery();
    let indices: Vec<usize> = match tau {
        Some(k) if k >= battery.len() => {
            return Err(Error::Options(format!("--tau {k} is outside the battery of {}", battery.len())))
        }
        Some(k) => vec![k],
        None => (0..battery.len()).collect(),
    };
    let functional = f.functional()?;
    let mut out = Vec::new();
    for k in indices {
        let v = functional.pair(&battery[k])?;
        r.row(format!("tau[{k}]"), &v);
        out.push(json!({ "index": k, "value": v }));
    }
    r.put("pairings", out);
    Ok(())
}

fn gf_check(text: &str, alg: &Algebra, r: &mut Report) -> Result<()> {
    let eq = parse_equation(text)?;
    let f = eval::eval_gen(&eq.lhs, alg)?;
    let g = eval::eval_gen(&eq.rhs, alg)?;
    let verdict = match eq.relation {
        Relation::Weak => f.weak_equal(&g),
        Relation::Associated => {
            if f.associated(&g)? {
                Verdict::True
            } else {
                Verdict::False
            }
        }
        Relation::Exact => {
            let mut v = Verdict::True;
            for x in eval::probe_points(alg.ctx()) {
                let (a, b) = (f.evaluate_at(&x)?, g.evaluate_at(&x)?);
                let scale = a.max_abs_coefficient().max(b.max_abs_coefficient()).max(1.0);
                if !a.approx_eq(&b, 1e-10 * scale) {
                    v = Verdict::False;
                    break;
                }
            }
            v
        }
    };
    r.row("relation", eq.relation.symbol());
    r.row("verdict", verdict);
    r.put("relation", eq.relation.symbol());
    r.put("verdict", verdict);
    Ok(())
}

fn laplace(expr: &str, inverse: bool, alg: &Algebra, r: &mut Report) -> Result<()> {
    let e = parse(expr)?;
    if inverse {
        let img = eval::eval_image(&e, alg.ctx())?;
        let f = inverse_transform(&img, alg)?;
        r.row("image", &img);
        r.row("inverse", &f);
        r.put("image", img.to_string());
        r.put("inverse", f.to_string());
    } else {
        if e.mentions(Symbol::Z) {
            return Err(Error::Domain("the forward transform takes an expression in t".into()));
        }
        let f = eval::eval_domain(&e, alg)?;
        let img = transform(&f, alg.ctx())?;
        r.row("function", &f);
        r.row("image", &img);
        r.row("half-plane", format!("Re z > {}", img.half_plane));
        r.put("function", f.to_string());
        r.put("image", img.to_string());
        r.put("terms", &img.terms);
        r.put("half_plane", img.half_plane);
    }
    Ok(())
}

fn ivp_parts(text: &str, ctx: &TruncationContext) -> Result<(Equation, [f64; 3])> {
    let eq = parse_equation(text)?;
    let a = eval::linear_in_y(&eq.lhs, ctx)?;
    Ok((eq, a))
}

fn solve(text: &str, y0: &str, yp0: &str, alg: &Algebra, r: &mut Report) -> Result<()> {
    let ctx = alg.ctx();
    let (eq, [a0, a1, a2]) = ivp_parts(text, ctx)?;
    let mode = match eq.relation {
        Relation::Weak => EqualityMode::Weak,
        Relation::Exact => EqualityMode::Exact,
        Relation::Associated => return Err(Error::Options("an IVP needs '~=' or '='".into())),
    };
    let spec = IvpSpec {
        a2,
        a1,
        a0,
        rhs: eval::eval_domain(&eq.rhs, alg)?,
        y0: scalar(y0, ctx)?,
        yp0: scalar(yp0, ctx)?,
        mode,
    };
    let sol = solve_ivp(&spec, alg)?;
    let verification = if sol.verified() { "PASS" } else { "FAIL" };
    r.row("image", &sol.image);
    r.row("solution", &sol.solution);
    r.row("y(0)", &sol.y0_obtained);
    if let Some(v) = &sol.yp0_obtained {
        r.row("y'(0)", v);
    }
    r.row("initial values", if sol.initial_ok { "hold" } else { "violated" });
    r.row("equation", sol.equation);
    r.row("verification", verification);
    r.put("image", sol.image.to_string());
    r.put("solution", sol.solution.to_string());
    r.put("y0", &sol.y0_obtained);
    r.put("yp0", &sol.yp0_obtained);
    r.put("initial_ok", sol.initial_ok);
    r.put("equation", sol.equation);
    r.put("verification", verification);
    if !sol.verified() {
        r.status = EXIT_INCONSISTENT;
    }
    Ok(())
}

fn audit(text: &str, y0: &str, yp0: &str, ruleset: &str, eps: f64, alg: &Algebra, r: &mut Report) -> Result<()> {
    let ctx = alg.ctx();
    let ruleset: Ruleset = ruleset.parse()?;
    if !(eps > 0.0) {
        return Err(Error::Options(format!("--eps must be positive, got {eps}")));
    }
    let (eq, [a0, a1, a2]) = ivp_parts(text, ctx)?;
    let spec = AuditSpec {
        a2,
        a1,
        a0,
        rhs: eval::eval_rhs_atoms(&eq.rhs, ctx)?,
        y0: scalar(y0, ctx)?,
        yp0: scalar(yp0, ctx)?,
        eps,
    };
    let report = audit_classical(&spec, ruleset, alg)?;
    for (k, line) in report.trace.iter().enumerate() {
        r.row(format!("step {}", k + 1), line);
    }
    r.row("solution", &report.solution);
    for v in &report.violations {
        r.row("violation", v);
    }
    let verdict = match report.verdict {
        AuditVerdict::Consistent => "consistent",
        AuditVerdict::Inconsistent => "inconsistent",
    };
    r.row("verdict", verdict);
    r.result = match serde_json::to_value(&report).expect("serializable") {
        Value::Object(m) => m,
        _ => unreachable!("a report serializes to an object"),
    };
    if report.verdict == AuditVerdict::Inconsistent {
        r.status = EXIT_INCONSISTENT;
    }
    Ok(())
}

fn mollifier_dump(points: usize, alg: &Algebra, r: &mut Report) -> Result<()> {
    if points < 2 {
        return Err(Error::Options("--points must be at least 2".into()));
    }
    let samples = alg.mollifier().sample(points);
    r.row("moment order", alg.mollifier().moment_order());
    r.row("points", points);
    r.put("moment_order", alg.mollifier().moment_order());
    r.put("samples", samples.iter().map(|(x, y)| [*x, *y]).collect::<Vec<_>>());
    for (x, y) in samples {
        r.row(format!("{x:+.6}"), format!("{y:.12e}"));
    }
    Ok(())
}

/// Runs one parsed command and collects its report.
pub fn dispatch(cmd: &Command) -> Result<Report> {
    let alg = Algebra::new(cmd.options.settings()?)?;
    let mut r = Report::default();
    match &cmd.verb {
        Verb::LcEval { expr } => lc_eval(expr, &alg, &mut r)?,
        Verb::GfPair { expr, tau } => gf_pair(expr, *tau, &alg, &mut r)?,
        Verb::GfCheck { relation } => gf_check(relation, &alg, &mut r)?,
        Verb::Laplace { expr, inverse } => laplace(expr, *inverse, &alg, &mut r)?,
        Verb::SolveIvp { equation, y0, yp0 } => solve(equation, y0, yp0, &alg, &mut r)?,
        Verb::Audit {
            equation,
            y0,
            yp0,
            ruleset,
            eps,
        } => audit(equation, y0, yp0, ruleset, *eps, &alg, &mut r)?,
        Verb::MollifierDump { points } => mollifier_dump(*points, &alg, &mut r)?,
    }
    Ok(r)
}

fn status_name(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_USAGE => "usage-error",
        EXIT_DOMAIN => "domain-error",
        _ => "inconsistent",
    }
}

/// Renders a report in the requested format.
pub fn emit(cmd: &Command, outcome: &Result<Report>, format: Format) -> String {
    let code = match outcome {
        Ok(r) => r.status,
        Err(e) => exit_code(e),
    };
    match format {
        Format::Machine => {
            let result = match outcome {
                Ok(r) => Value::Object(r.result.clone()),
                Err(e) => json!({ "error": { "kind": error_kind(e), "message": e.to_string() } }),
            };
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": cmd.verb.name(),
                "input": cmd.verb.input(),
                "options": cmd.options,
                "status": status_name(code),
                "exit_code": code,
                "result": result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let o = &cmd.options;
            let mut rows = vec![
                ("command".to_string(), cmd.verb.name().to_string()),
                ("input".to_string(), cmd.verb.input()),
                (
                    "options".to_string(),
                    format!(
                        "trunc={} moment-order={} quad-tol={:e} battery={} seed={}",
                        o.trunc, o.moment_order, o.quad_tol, o.battery, o.seed
                    ),
                ),
            ];
            match outcome {
                Ok(r) => rows.extend(r.rows.iter().cloned()),
                Err(e) => rows.push(("error".into(), e.to_string())),
            }
            rows.push(("status".into(), status_name(code).into()));
            let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            let mut out = String::new();
            for (k, v) in rows {
                let pad = width - k.chars().count();
                let _ = writeln!(out, "{k}{}  {v}", " ".repeat(pad));
            }
            out
        }
    }
}

/// Parses arguments, dispatches and renders. Never panics on bad input.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = match Command::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let outcome = dispatch(&cmd);
    let stdout = emit(&cmd, &outcome, cmd.options.format);
    match outcome {
        Ok(r) => Outcome { code: r.status, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout,
            stderr: format!("error: {e}\n"),
        },
    }
}
