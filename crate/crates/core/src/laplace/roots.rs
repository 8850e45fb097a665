//! Roots of standard complex polynomials with multiplicities.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A distinct root and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn durand_kerner(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = monic.len() - 1;
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    for _ in 0..5000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = horner(monic, z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            return Ok(z);
        }
    }
    // repeated roots converge only linearly; the cluster means are still good
    if z.iter().all(|r| horner(monic, *r).norm() < 1e-8 * radius.powi(n as i32)) {
        Ok(z)
    } else {
        Err(Error::Unsupported("root finder did not converge".into()))
    }
}

/// Roots of `Σ c_k z^k` grouped by multiplicity. Closed form up to degree 2.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Root>> {
    let mut p = coeffs.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let lead = *p.last().expect("nonempty");
    let monic: Vec<Complex64> = p.iter().map(|c| c / lead).collect();
    // factor out roots at zero exactly
    let zeros = monic.iter().take_while(|c| c.norm() == 0.0).count();
    let rest = &monic[zeros..];
    let raw: Vec<Complex64> = match rest.len() - 1 {
        0 => Vec::new(),
        1 => vec![-rest[0]],
        2 => {
            let (b, c) = (rest[1], rest[0]);
            let disc = (b * b - 4.0 * c).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
            if q.norm() == 0.0 {
                vec![Complex64::new(0.0, 0.0); 2]
            } else {
                vec![q, c / q]
            }
        }
        _ => durand_kerner(rest)?,
    };
    let mut out: Vec<(Vec<Complex64>, usize)> = Vec::new();
    if zeros > 0 {
        out.push((vec![Complex64::new(0.0, 0.0)], zeros));
    }
    for g in clusters(rest, raw) {
        let m = g.len();
        out.push((g, m));
    }
    let real = monic.iter().all(|c| c.im == 0.0);
    let mut found: Vec<Root> = out
        .into_iter()
        .map(|(g, m)| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            let mut value = if mean.norm() == 0.0 { mean } else { polish(&monic, mean, m) };
            if real && value.im.abs() < 1e-7 * value.norm().max(1.0) && g.len() > 1 {
                value.im = 0.0;
            }
            Root {
                value: clean(value),
                multiplicity: m,
            }
        })
        .collect();
    if real {
        // real coefficients: pair each lower root with the conjugate of its partner
        for k in 0..found.len() {
            let r = found[k];
            if r.value.im >= 0.0 {
                continue;
            }
            let tol = 1e-6 * r.value.norm().max(1.0);
            if let Some(p) = found
                .iter()
                .find(|p| p.value.im > 0.0 && p.multiplicity == r.multiplicity && (p.value.conj() - r.value).norm() < tol)
            {
                found[k].value = p.value.conj();
            }
        }
    }
    Ok(found)
}

/// Groups computed roots that are one multiple root smeared by rounding. A
/// root of multiplicity `m` spreads over roughly `eps^(1/m)`, so candidates
/// are linked generously; a group is kept only if `p, p', …, p^(m-1)` all
/// vanish at its centre, and is otherwise split again at a finer scale.
fn clusters(monic: &[Complex64], raw: Vec<Complex64>) -> Vec<Vec<Complex64>> {
    let n = raw.len();
    let spread = 4.0 * f64::EPSILON.powf(1.0 / n.max(2) as f64);
    split(monic, raw, spread)
}

fn split(monic: &[Complex64], raw: Vec<Complex64>, spread: f64) -> Vec<Vec<Complex64>> {
    let n = raw.len();
    if n < 2 {
        return vec![raw];
    }
    if spread < 1e-13 {
        return raw.into_iter().map(|r| vec![r]).collect();
    }
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let tol = spread * raw[i].norm().max(raw[j].norm()).max(1.0);
            if (raw[i] - raw[j]).norm() < tol {
                let (a, b) = (label[i], label[j]);
                label.iter_mut().filter(|l| **l == a).for_each(|l| *l = b);
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (k, r) in raw.iter().enumerate() {
        match seen.iter().position(|l| *l == label[k]) {
            Some(g) => groups[g].push(*r),
            None => {
                seen.push(label[k]);
                groups.push(vec![*r]);
            }
        }
    }
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 || is_multiple(monic, &g) {
            out.push(g);
        } else {
            out.extend(split(monic, g, spread / 10.0));
        }
    }
    out
}

fn is_multiple(monic: &[Complex64], group: &[Complex64]) -> bool {
    let m = group.len();
    let mean = group.iter().sum::<Complex64>() / m as f64;
    let c = polish(monic, mean, m);
    let radius = c.norm().max(1.0);
    let size: f64 = monic.iter().map(|a| a.norm()).sum::<f64>() * radius.powi(monic.len() as i32);
    let mut f = monic.to_vec();
    let mut factorial = 1.0;
    for k in 0..m {
        if k > 0 {
            f = derivative(&f);
            factorial *= k as f64;
        }
        // distinct roots at distance d leave |p^(k)(c)|/k! of order d^(m-k)
        let allowed = size * (1e3 * f64::EPSILON).powf((m - k) as f64 / m as f64);
        if horner(&f, c).norm() / factorial > allowed {
            return false;
        }
    }
    true
}

fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Newton on `p^(m-1)`, where a root of multiplicity `m` is simple.
fn polish(p: &[Complex64], z0: Complex64, m: usize) -> Complex64 {
    let mut f = p.to_vec();
    for _ in 1..m {
        f = derivative(&f);
    }
    let df = derivative(&f);
    let mut z = z0;
    for _ in 0..50 {
        let d = horner(&df, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner(&f, z) / d;
        if !step.is_finite() || step.norm() > 1e-3 * z0.norm().max(1.0) {
            return z0;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Snaps parts that are rounding noise to zero or to the nearest integer.
fn clean(z: Complex64) -> Complex64 {
    let scale = z.norm().max(1.0);
    let snap = |x: f64| {
        if x.abs() < 1e-13 * scale {
            0.0
        } else if (x - x.round()).abs() < 1e-14 * scale {
            x.round()
        } else {
            x
        }
    };
    Complex64::new(snap(z.re), snap(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triple_and_quadruple_roots() {
        // (z - 1)^3 = z^3 - 3 z^2 + 3 z - 1
        let r = roots(&[c(-1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r, vec![Root { value: c(1.0, 0.0), multiplicity: 3 }]);
        // (z + 2)^4
        let r = roots(&[c(16.0, 0.0), c(32.0, 0.0), c(24.0, 0.0), c(8.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r, vec![Root { value: c(-2.0, 0.0), multiplicity: 4 }]);
    }

    #[test]
    fn neighbouring_double_pairs() {
        // ((z + 2)^2 + 9)^2 ((z + 1)^2 + 9)^2
        let a = [13.0, 4.0, 1.0];
        let b = [10.0, 2.0, 1.0];
        let mul = |p: &[f64], q: &[f64]| {
            let mut r = vec![0.0; p.len() + q.len() - 1];
            for (i, x) in p.iter().enumerate() {
                for (j, y) in q.iter().enumerate() {
                    r[i + j] += x * y;
                }
            }
            r
        };
        let p = mul(&mul(&a, &a), &mul(&b, &b));
        let p: Vec<Complex64> = p.iter().map(|x| c(*x, 0.0)).collect();
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 4, "{r:?}");
        for x in r {
            assert_eq!(x.multiplicity, 2);
            assert!((x.value.im.abs() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn close_distinct_roots_stay_apart() {
        // (z - 1)(z - 1.001)(z + 3)
        let p = [c(3.003, 0.0), c(-4.997, 0.0), c(0.999, 0.0), c(1.0, 0.0)];
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn quadratic_pair() {
        let r = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|x| x.value == c(0.0, 1.0)));
        assert!(r.iter().any(|x| x.value == c(0.0, -1.0)));
    }

    #[test]
    fn repeated_quartic() {
        // (z^2 + 1)^2 = z^4 + 2 z^2 + 1
        let r = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        for x in r {
            assert_eq!(x.multiplicity, 2);
            assert!((x.value.norm() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn double_real_root_is_real() {
        // (z^2 + 4)(z - 1)^2
        let r = roots(&[c(4.0, 0.0), c(-8.0, 0.0), c(5.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 3);
        let one = r.iter().find(|x| x.multiplicity == 2).unwrap();
        assert_eq!(one.value.im, 0.0);
        assert!((one.value.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn repeated_pair_is_conjugate() {
        // (z^2 + 2z + 5)^2
        let r = roots(&[c(25.0, 0.0), c(20.0, 0.0), c(14.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].value, r[1].value.conj());
        assert!((r[0].value - c(-1.0, 2.0)).norm() < 1e-12 || (r[0].value - c(-1.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_roots_are_exact() {
        // z^2 (z - 3)
        let r = roots(&[c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r[0], Root { value: c(0.0, 0.0), multiplicity: 2 });
        assert_eq!(r[1].value, c(3.0, 0.0));
    }
}
