//! Bump kernels with vanishing moments, used as the representatives behind
//! every delta and Heaviside atom.
//!
//! A mollifier of moment order `n` is `φ(x) = P(x) exp(-1/(1-x²))` on
//! `(-1, 1)`, extended by zero, with `P` even of degree at most `n` chosen so
//! that `∫ φ = 1` and `∫ x^k φ = 0` for `1 ≤ k ≤ n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::QuadratureScheme;
use crate::smooth::Jet;

const TABLE_PANELS: usize = 1024;

/// Description of a test-function shape for [`radius_of_support`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SupportShape {
    /// The zero function.
    Zero,
    /// `φ(·/ε)` for a kernel supported in `[-1, 1]`.
    Scaled(f64),
}

/// `R_φ = sup{|x| : φ(x) ≠ 0}`, or 1 for the zero function.
pub fn radius_of_support(shape: SupportShape) -> f64 {
    match shape {
        SupportShape::Zero => 1.0,
        SupportShape::Scaled(eps) => eps.abs(),
    }
}

/// `exp(-1/(1-x²))` on `(-1, 1)`, 0 elsewhere.
pub fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

pub(crate) fn bump_jet(u0: f64, order: usize) -> Jet {
    if u0.abs() >= 1.0 {
        return Jet::constant(Complex64::new(0.0, 0.0), order);
    }
    let x = Jet::variable(Complex64::new(u0, 0.0), order);
    let one_minus = &Jet::constant(Complex64::new(1.0, 0.0), order) - &(&x * &x);
    let r = one_minus.recip().expect("inside (-1, 1)");
    (-&r).exp()
}

#[derive(Clone, Debug)]
pub struct Mollifier {
    moment_order: usize,
    coeffs: Vec<f64>,
    scheme: QuadratureScheme,
    cumulative: Vec<f64>,
}

/// Numerical check of the directing-set conditions for one mollifier.
#[derive(Clone, Debug, Serialize)]
pub struct DnReport {
    pub n: usize,
    pub moments_ok: bool,
    /// `∫ x^k φ - δ_{k0}` for `k = 0..=n`.
    pub moment_residuals: Vec<f64>,
    pub l1: f64,
    pub l1_bound: f64,
    pub l1_ok: bool,
    pub sup_derivatives: Vec<SupBound>,
}

/// `sup |∂^α φ_n|` for the copy rescaled to radius `1/n`, against `n^{2(α+1)}`.
#[derive(Clone, Debug, Serialize)]
pub struct SupBound {
    pub alpha: usize,
    pub measured: f64,
    pub bound: f64,
    pub ok: bool,
}

impl Mollifier {
    /// Solves the even moment system for `P`. Deterministic in `n`.
    pub fn construct(n: usize) -> Result<Mollifier> {
        Self::construct_with(n, QuadratureScheme::default())
    }

    pub fn construct_with(n: usize, scheme: QuadratureScheme) -> Result<Mollifier> {
        let m = n / 2;
        let bump_moments = (0..=4 * m)
            .map(|k| {
                if k % 2 == 1 {
                    Ok(0.0)
                } else {
                    scheme.integrate(|x| x.powi(k as i32) * bump(x), -1.0, 1.0)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let size = m + 1;
        let matrix: Vec<Vec<f64>> = (0..size)
            .map(|i| (0..size).map(|j| bump_moments[2 * i + 2 * j]).collect())
            .collect();
        let mut rhs = vec![0.0; size];
        rhs[0] = 1.0;
        let (even, condition) = solve_with_condition(&matrix, &rhs)?;
        if condition > 1e13 {
            return Err(Error::Construction {
                reason: format!("moment matrix of order {size} is ill-conditioned"),
                condition,
            });
        }
        let mut coeffs = vec![0.0; 2 * m + 1];
        for (i, p) in even.into_iter().enumerate() {
            coeffs[2 * i] = p;
        }
        Ok(Self::build(n, coeffs, scheme))
    }

    /// `P(x) exp(-1/(1-x²))` for an arbitrary polynomial `P`, without any
    /// moment guarantees.
    pub fn from_coefficients(moment_order: usize, coeffs: Vec<f64>) -> Mollifier {
        Self::build(moment_order, coeffs, QuadratureScheme::default())
    }

    fn build(moment_order: usize, coeffs: Vec<f64>, scheme: QuadratureScheme) -> Mollifier {
        let mut m = Mollifier {
            moment_order,
            coeffs,
            scheme,
            cumulative: Vec::new(),
        };
        m.cumulative = m.cumulative_table();
        m
    }

    fn cumulative_table(&self) -> Vec<f64> {
        let h = 2.0 / TABLE_PANELS as f64;
        let mut table = Vec::with_capacity(TABLE_PANELS + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 0..TABLE_PANELS {
            let a = -1.0 + h * i as f64;
            acc += crate::quad::panel(|x| self.value(x), a, a + h);
            table.push(acc);
        }
        table
    }

    pub fn moment_order(&self) -> usize {
        self.moment_order
    }

    /// Coefficients of `P`, lowest degree first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scheme(&self) -> &QuadratureScheme {
        &self.scheme
    }

    fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0.0)
    }

    fn poly(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.poly(x) * bump(x)
        }
    }

    /// Normalized Taylor coefficients of `φ` at `u0`, orders `0..=order`.
    pub fn jet(&self, u0: f64, order: usize) -> Jet {
        let b = bump_jet(u0, order);
        let x = Jet::variable(Complex64::new(u0, 0.0), order);
        let mut p = Jet::constant(Complex64::new(0.0, 0.0), order);
        for c in self.coeffs.iter().rev() {
            p = &(&p * &x) + &Jet::constant(Complex64::new(*c, 0.0), order);
        }
        &p * &b
    }

    /// `φ^(k)(x)`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        self.jet(x, k).derivative(k).re
    }

    /// Taylor coefficients of `φ^(deriv)` at `u0`, orders `0..=order`.
    pub fn derivative_taylor(&self, deriv: usize, u0: f64, order: usize) -> Vec<f64> {
        self.jet(u0, order + deriv)
            .differentiate(deriv)
            .coeffs()
            .iter()
            .map(|c| c.re)
            .collect()
    }

    /// `Φ(x) = ∫_{-1}^x φ`.
    pub fn cumulative(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return self.cumulative[TABLE_PANELS];
        }
        let h = 2.0 / TABLE_PANELS as f64;
        let i = (((x + 1.0) / h).floor() as usize).min(TABLE_PANELS - 1);
        let a = -1.0 + h * i as f64;
        self.cumulative[i] + crate::quad::panel(|t| self.value(t), a, x)
    }

    /// Taylor coefficients of `Φ` at `u0`, orders `0..=order`.
    pub fn cumulative_taylor(&self, u0: f64, order: usize) -> Vec<f64> {
        let mut out = vec![self.cumulative(u0)];
        if order > 0 {
            let d = self.jet(u0, order - 1);
            out.extend(
                d.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.re / (k + 1) as f64),
            );
        }
        out
    }

    /// `∫ x^k φ`. Odd moments of an even kernel are exactly zero.
    pub fn moment(&self, k: usize) -> Result<f64> {
        if k % 2 == 1 && self.is_even() {
            return Ok(0.0);
        }
        self.scheme
            .integrate(|x| x.powi(k as i32) * self.value(x), -1.0, 1.0)
    }

    /// `∫ x^k φ(x/ε)/ε dx`, integrated directly on `[-ε, ε]`.
    pub fn scaled_moment(&self, k: usize, eps: f64) -> Result<f64> {
        self.scheme.integrate(
            |x| x.powi(k as i32) * self.value(x / eps) / eps,
            -eps,
            eps,
        )
    }

    /// `∫ |φ|`, integrated piecewise between the sign changes of `P`.
    pub fn l1_norm(&self) -> Result<f64> {
        let mut breaks = vec![-1.0];
        let grid = 400;
        for i in 0..grid {
            let a = -1.0 + 2.0 * i as f64 / grid as f64;
            let b = a + 2.0 / grid as f64;
            if self.poly(a) * self.poly(b) < 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.poly(lo) * self.poly(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                breaks.push(0.5 * (lo + hi));
            }
        }
        breaks.push(1.0);
        breaks
            .windows(2)
            .map(|w| Ok(self.scheme.integrate(|x| self.value(x), w[0], w[1])?.abs()))
            .sum()
    }

    pub fn radius_of_support(&self) -> f64 {
        if self.coeffs.iter().all(|c| *c == 0.0) {
            radius_of_support(SupportShape::Zero)
        } else {
            radius_of_support(SupportShape::Scaled(1.0))
        }
    }

    /// Informational report on the directing-set conditions for index `n`.
    pub fn dn_membership_report(&self, n: usize) -> Result<DnReport> {
        let n_eff = n.max(1);
        let moment_residuals = (0..=n)
            .map(|k| Ok(self.moment(k)? - if k == 0 { 1.0 } else { 0.0 }))
            .collect::<Result<Vec<f64>>>()?;
        let moments_ok = moment_residuals.iter().all(|r| r.abs() <= 1e-10);
        let l1 = self.l1_norm()?;
        let l1_bound = 1.0 + 1.0 / n_eff as f64;
        let scale = n_eff as f64;
        let sup_derivatives = (0..=3)
            .map(|alpha| {
                let raw = (0..2001)
                    .map(|i| {
                        let x = -1.0 + 2.0 * i as f64 / 2000.0;
                        self.derivative(alpha, x).abs()
                    })
                    .fold(0.0, f64::max);
                let measured = raw * scale.powi(alpha as i32 + 1);
                let bound = scale.powi(2 * (alpha as i32 + 1));
                SupBound {
                    alpha,
                    measured,
                    bound,
                    ok: measured <= bound,
                }
            })
            .collect();
        Ok(DnReport {
            n,
            moments_ok,
            moment_residuals,
            l1,
            l1_bound,
            l1_ok: l1 <= l1_bound,
            sup_derivatives,
        })
    }

    /// `(x, φ(x))` at `count` uniform nodes on `[-1, 1]`.
    pub fn sample(&self, count: usize) -> Vec<(f64, f64)> {
        let count = count.max(2);
        (0..count)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (count - 1) as f64;
                (x, self.value(x))
            })
            .collect()
    }
}

/// Gaussian elimination with partial pivoting; also returns the infinity-norm
/// condition number.
fn solve_with_condition(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut inverse_cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        inverse_cols.push(gauss(a, &e).ok_or(Error::Construction {
            reason: "singular moment matrix".into(),
            condition: f64::INFINITY,
        })?);
    }
    let inv_norm = (0..n)
        .map(|i| inverse_cols.iter().map(|c| c[i].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let x = gauss(a, b).ok_or(Error::Construction {
        reason: "singular moment matrix".into(),
        condition: f64::INFINITY,
    })?;
    Ok((x, norm * inv_norm))
}

fn gauss(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trapezoid rule; spectrally accurate for functions flat at both ends.
    fn trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 2.0 / n as f64;
        (1..n).map(|i| f(-1.0 + h * i as f64)).sum::<f64>() * h
    }

    #[test]
    fn moments_vanish_up_to_order() {
        for n in 0..=4 {
            let phi = Mollifier::construct(n).unwrap();
            assert!((phi.moment(0).unwrap() - 1.0).abs() < 1e-10, "n = {n}");
            for k in 1..=n {
                let m = trapezoid(|x| x.powi(k as i32) * phi.value(x), 4000);
                assert!(m.abs() < 1e-10, "n = {n}, k = {k}: {m}");
            }
        }
    }

    #[test]
    fn odd_moment_is_exactly_zero() {
        let phi = Mollifier::construct(2).unwrap();
        assert_eq!(phi.moment(1).unwrap(), 0.0);
        assert_eq!(phi.moment(3).unwrap(), 0.0);
    }

    #[test]
    fn fourth_moment_matches_trapezoid() {
        let phi = Mollifier::construct(2).unwrap();
        let q = phi.moment(4).unwrap();
        let t = trapezoid(|x| x.powi(4) * phi.value(x), 4000);
        assert!(q.abs() > 1e-3);
        assert!((q - t).abs() < 1e-12, "{q} vs {t}");
    }

    #[test]
    fn cumulative_endpoints_and_identity() {
        let phi = Mollifier::construct(2).unwrap();
        assert_eq!(phi.cumulative(-1.0), 0.0);
        assert!((phi.cumulative(1.0) - 1.0).abs() < 1e-10);
        assert!((phi.cumulative(0.0) - 0.5).abs() < 1e-10);
        let q = QuadratureScheme::default()
            .integrate(|x| phi.cumulative(x) * phi.value(x), -1.0, 1.0)
            .unwrap();
        assert!((q - 0.5).abs() < 1e-8);
    }

    #[test]
    fn cumulative_taylor_is_consistent() {
        let phi = Mollifier::construct(2).unwrap();
        let c = phi.cumulative_taylor(0.3, 2);
        assert!((c[1] - phi.value(0.3)).abs() < 1e-14);
        assert!((2.0 * c[2] - phi.derivative(1, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let phi = Mollifier::construct(2).unwrap();
        let h = 1e-5;
        for &x in &[-0.7, 0.0, 0.4] {
            let fd = (phi.value(x + h) - phi.value(x - h)) / (2.0 * h);
            assert!((phi.derivative(1, x) - fd).abs() < 1e-8);
        }
        assert_eq!(phi.derivative(3, 1.0), 0.0);
    }

    #[test]
    fn radius() {
        assert_eq!(radius_of_support(SupportShape::Zero), 1.0);
        assert_eq!(radius_of_support(SupportShape::Scaled(0.25)), 0.25);
        assert_eq!(Mollifier::construct(2).unwrap().radius_of_support(), 1.0);
        assert_eq!(Mollifier::from_coefficients(0, vec![0.0]).radius_of_support(), 1.0);
    }

    #[test]
    fn scaling_covariance() {
        let phi = Mollifier::construct(2).unwrap();
        for k in 0..=4 {
            let eps = 0.3;
            let lhs = phi.scaled_moment(k, eps).unwrap();
            let rhs = eps.powi(k as i32) * phi.moment(k).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn reports() {
        let r = Mollifier::construct(0).unwrap().dn_membership_report(1).unwrap();
        assert!(r.moments_ok);
        let phi2 = Mollifier::construct(2).unwrap();
        let r2 = phi2.dn_membership_report(2).unwrap();
        let oracle = trapezoid(|x| phi2.value(x).abs(), 200_000);
        assert!((r2.l1 - oracle).abs() < 1e-8, "{} vs {oracle}", r2.l1);
        assert!(r2.l1 > 1.0);
        assert_eq!(r2.l1_bound, 1.5);
        let zero = Mollifier::from_coefficients(2, vec![0.0]);
        assert!(!zero.dn_membership_report(2).unwrap().moments_ok);
    }
}
