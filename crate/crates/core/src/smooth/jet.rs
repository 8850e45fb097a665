//! Truncated Taylor arithmetic ("jets") over the complex numbers.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalized Taylor coefficients `f^(k)(x0)/k!`, `k = 0..=order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(Vec<Complex64>);

impl Jet {
    pub fn constant(c: Complex64, order: usize) -> Jet {
        let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: Complex64, order: usize) -> Jet {
        let mut j = Jet::constant(x0, order);
        if order >= 1 {
            j.0[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(c: Vec<Complex64>) -> Jet {
        assert!(!c.is_empty(), "empty jet");
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.0
    }

    pub fn value(&self) -> Complex64 {
        self.0[0]
    }

    /// `f^(k)(x0)`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.0.get(k).copied().unwrap_or_default() * factorial(k)
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet(self.0.iter().map(|c| c * k).collect())
    }

    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.0[0];
        if a0 == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        let n = self.0.len();
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        r[0] = a0.inv();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.0[j] * r[k - j];
            }
            r[k] = -acc / a0;
        }
        Ok(Jet(r))
    }

    pub fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[0] = self.0[0].exp();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.0[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Jet(e)
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.0.len();
        let mut s = vec![Complex64::new(0.0, 0.0); n];
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for k in 1..n {
            let mut as_ = Complex64::new(0.0, 0.0);
            let mut ac = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let w = self.0[j] * j as f64;
                as_ += w * c[k - j];
                ac += w * s[k - j];
            }
            s[k] = as_ / k as f64;
            c[k] = -ac / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// Principal logarithm; the branch cut `(-∞, 0]` is outside the domain.
    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.0[0];
        if a0.im == 0.0 && a0.re <= 0.0 {
            return Err(Error::Domain(format!("ln at {a0} (branch cut)")));
        }
        let n = self.0.len();
        let mut l = vec![Complex64::new(0.0, 0.0); n];
        l[0] = a0.ln();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..k {
                acc += l[j] * self.0[k - j] * j as f64;
            }
            l[k] = (self.0[k] - acc / k as f64) / a0;
        }
        Ok(Jet(l))
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut result = Jet::constant(Complex64::new(1.0, 0.0), self.order());
        for _ in 0..n {
            result = &result * self;
        }
        result
    }

    /// Taylor coefficients of `f^(d)` from those of `f`, losing `d` orders.
    pub fn differentiate(&self, d: usize) -> Jet {
        let n = self.0.len();
        if d >= n {
            return Jet(vec![Complex64::new(0.0, 0.0)]);
        }
        Jet((0..n - d)
            .map(|k| self.0[k + d] * falling(k + d, d))
            .collect())
    }
}

/// `n (n-1) ... (n-d+1)`.
pub(crate) fn falling(n: usize, d: usize) -> f64 {
    ((n + 1 - d)..=n).fold(1.0, |acc, x| acc * x as f64)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, x| acc * x as f64)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.0.len().min(rhs.0.len());
        Jet((0..n).map(|k| self.0[k] + rhs.0[k]).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.0.len().min(rhs.0.len());
        Jet((0..n).map(|k| self.0[k] - rhs.0[k]).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.0.len().min(rhs.0.len());
        Jet((0..n)
            .map(|k| (0..=k).map(|j| self.0[j] * rhs.0[k - j]).sum())
            .collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exp_at_zero_is_inverse_factorials() {
        let e = Jet::variable(c(0.0), 6).exp();
        for k in 0..=6 {
            assert!((e.coeffs()[k].re - 1.0 / factorial(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn sin_derivatives_cycle() {
        let t0 = 0.7;
        let (s, _) = Jet::variable(c(t0), 5).sin_cos();
        let expect = [t0.sin(), t0.cos(), -t0.sin(), -t0.cos(), t0.sin(), t0.cos()];
        for (k, e) in expect.iter().enumerate() {
            assert!((s.derivative(k).re - e).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn recip_and_ln() {
        let x = Jet::variable(c(2.0), 4);
        let r = x.recip().unwrap();
        let one = &r * &x;
        assert!((one.coeffs()[0].re - 1.0).abs() < 1e-15);
        for k in 1..=4 {
            assert!(one.coeffs()[k].norm() < 1e-15);
        }
        let l = x.ln().unwrap();
        assert!((l.derivative(1).re - 0.5).abs() < 1e-15);
        assert!((l.derivative(2).re + 0.25).abs() < 1e-15);
        assert!(Jet::variable(c(-1.0), 2).ln().is_err());
    }

    #[test]
    fn differentiate_shifts_orders() {
        let e = Jet::variable(c(0.0), 5).exp();
        let d2 = e.differentiate(2);
        assert_eq!(d2.order(), 3);
        assert!((d2.coeffs()[0].re - 1.0).abs() < 1e-15);
        assert!((d2.coeffs()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
