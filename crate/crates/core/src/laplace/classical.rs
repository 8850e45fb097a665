use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::gf::{Algebra, GenFunction};
use crate::lc::{LcComplex, LcReal, TruncationContext};
use crate::smooth::{factorial, format_complex, Jet, SmoothExpr};

use super::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oscillation {
    One,
    Sin,
    Cos,
}

/// `t^power e^(alpha t) osc(omega t)`, optionally delayed to
/// `H(t - a) f(t - a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalFn {
    pub power: u32,
    pub alpha: f64,
    pub omega: f64,
    pub osc: Oscillation,
    pub delay: Option<LcReal>,
}

impl ClassicalFn {
    pub fn exp_poly(power: u32, alpha: f64) -> Self {
        ClassicalFn {
            power,
            alpha,
            omega: 0.0,
            osc: Oscillation::One,
            delay: None,
        }
    }

    pub fn one() -> Self {
        Self::exp_poly(0, 0.0)
    }

    pub fn sin(omega: f64) -> Self {
        ClassicalFn {
            omega,
            osc: Oscillation::Sin,
            ..Self::one()
        }
    }

    pub fn cos(omega: f64) -> Self {
        ClassicalFn {
            omega,
            osc: Oscillation::Cos,
            ..Self::one()
        }
    }

    pub fn with_exp(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_power(mut self, power: u32) -> Self {
        self.power = power;
        self
    }

    pub fn delayed(mut self, a: LcReal) -> Self {
        self.delay = if a.is_zero() { None } else { Some(a) };
        self
    }

    /// Growth constant: `|f(t)| <= C e^{λ t}` for every `λ > alpha`.
    pub fn growth(&self) -> f64 {
        self.alpha
    }

    pub fn expr(&self) -> SmoothExpr {
        let t = SmoothExpr::t();
        let mut e = SmoothExpr::pow(t.clone(), self.power);
        if self.alpha != 0.0 {
            e = SmoothExpr::mul(e, SmoothExpr::exp(SmoothExpr::mul(SmoothExpr::real(self.alpha), t.clone())));
        }
        let arg = SmoothExpr::mul(SmoothExpr::real(self.omega), t);
        match self.osc {
            Oscillation::One => e,
            Oscillation::Sin => SmoothExpr::mul(e, SmoothExpr::sin(arg)),
            Oscillation::Cos => SmoothExpr::mul(e, SmoothExpr::cos(arg)),
        }
    }

    /// The classical transform of the undelayed function as `(num, den)`.
    pub fn image(&self, ctx: &TruncationContext) -> (Poly, Poly) {
        let n = self.power as usize;
        let nf = factorial(n);
        match self.osc {
            Oscillation::One => (
                Poly::from_real(&[nf], ctx),
                Poly::linear_factor(Complex64::new(self.alpha, 0.0), ctx).pow(n + 1),
            ),
            Oscillation::Sin | Oscillation::Cos => {
                // n!/(z - β)^{n+1} = n! (z - β̄)^{n+1} / Q^{n+1}, β = α + iω
                let beta = Complex64::new(self.alpha, self.omega);
                let conj = Poly::linear_factor(beta.conj(), ctx).pow(n + 1);
                let q = Poly::from_real(
                    &[self.alpha * self.alpha + self.omega * self.omega, -2.0 * self.alpha, 1.0],
                    ctx,
                );
                let part: Vec<Complex64> = conj
                    .standard()
                    .expect("standard coefficients")
                    .into_iter()
                    .map(|c| {
                        let v = if self.osc == Oscillation::Sin { c.im } else { c.re };
                        Complex64::new(v * nf, 0.0)
                    })
                    .collect();
                (Poly::from_complex(&part, ctx), q.pow(n + 1))
            }
        }
    }

    /// Realization in the algebra: the undelayed function on the whole line,
    /// or `H(t - a) f(t - a)`.
    pub fn to_gen(&self, alg: &Algebra) -> Result<GenFunction> {
        let f = alg.embed_smooth(self.expr());
        match &self.delay {
            None => Ok(f),
            Some(a) => Ok(&alg.heaviside().translate(a)? * &f.translate(a)?),
        }
    }

    /// One-sided derivatives `f^(k)(0+)` for `k = 0..=order`, delay included.
    pub fn right_limits(&self, order: usize) -> Result<Vec<Complex64>> {
        if let Some(a) = &self.delay {
            if a.signum() > 0 {
                return Ok(vec![Complex64::new(0.0, 0.0); order + 1]);
            }
        }
        let jet: Jet = self.expr().jet(Complex64::new(0.0, 0.0), None, order)?;
        Ok((0..=order).map(|k| jet.derivative(k)).collect())
    }

    /// Replaces a delay by its standard part (the limit of a real delay).
    pub fn delay_limit(&self) -> Result<ClassicalFn> {
        let mut out = self.clone();
        out.delay = None;
        if let Some(a) = &self.delay {
            let st = a.standard_part()?;
            if st != 0.0 {
                out.delay = Some(LcReal::constant(st, a.ctx()));
            }
        }
        Ok(out)
    }

    fn body(&self, t: &str) -> String {
        self.expr().render(t)
    }
}

impl fmt::Display for ClassicalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.delay {
            None => f.write_str(&self.body("t")),
            Some(a) => {
                let arg = format!("t {}", crate::gf::signed_tail(a));
                let body = self.body(&arg);
                if body == "1" {
                    write!(f, "H({arg})")
                } else {
                    write!(f, "H({arg})*{body}")
                }
            }
        }
    }
}

/// `Σ α_n φ_n + Σ β_m ψ_m`: classical parts plus generalized parts.
#[derive(Clone, Debug, Default)]
pub struct DomainElement {
    pub classical: Vec<(LcComplex, ClassicalFn)>,
    pub generalized: Vec<(LcComplex, GenFunction)>,
}

fn coeff_prefix(c: &LcComplex) -> Option<String> {
    let standard = c.exponents().iter().all(|e| e.is_zero());
    if standard {
        let v = c.standard_part().ok()?;
        if v == Complex64::new(1.0, 0.0) {
            return None;
        }
        let text = format_complex(v);
        Some(if text.contains(' ') { format!("({text})") } else { text })
    } else {
        Some(format!("({c})"))
    }
}

fn with_coefficient(prefix: Option<String>, body: String) -> String {
    match prefix {
        None => body,
        Some(p) if body == "1" => p,
        Some(p) if p == "-1" => format!("-{body}"),
        Some(p) => format!("{p}*{body}"),
    }
}

/// True if `text` has a `+` or `-` between terms outside parentheses.
fn top_level_sum(text: &str) -> bool {
    let mut depth = 0i32;
    let bytes = text.as_bytes();
    for (k, b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && k > 0 && bytes[k - 1] == b' ' => return true,
            _ => {}
        }
    }
    false
}

impl DomainElement {
    pub fn classical(c: LcComplex, f: ClassicalFn) -> Self {
        DomainElement {
            classical: vec![(c, f)],
            generalized: Vec::new(),
        }
    }

    pub fn generalized(c: LcComplex, psi: GenFunction) -> Self {
        DomainElement {
            classical: Vec::new(),
            generalized: vec![(c, psi)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.classical.is_empty() && self.generalized.is_empty()
    }

    pub fn plus(mut self, other: DomainElement) -> Self {
        self.classical.extend(other.classical);
        self.generalized.extend(other.generalized);
        self
    }

    pub fn scaled(&self, c: &LcComplex) -> Self {
        DomainElement {
            classical: self.classical.iter().map(|(a, f)| (a * c, f.clone())).collect(),
            generalized: self
                .generalized
                .iter()
                .map(|(a, f)| (a * c, f.clone()))
                .collect(),
        }
    }

    pub fn to_gen(&self, alg: &Algebra) -> Result<GenFunction> {
        let mut acc = alg.zero();
        for (c, f) in &self.classical {
            acc = &acc + &f.to_gen(alg)?.scale(c);
        }
        for (c, psi) in &self.generalized {
            acc = &acc + &psi.scale(c);
        }
        Ok(acc)
    }
}

impl fmt::Display for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (c, g) in &self.classical {
            parts.push(with_coefficient(coeff_prefix(c), g.to_string()));
        }
        for (c, g) in &self.generalized {
            let body = g.to_string();
            let body = if top_level_sum(&body) { format!("({body})") } else { body };
            parts.push(with_coefficient(coeff_prefix(c), body));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        f.write_str(&out)
    }
}
