use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mollifier::{bump, bump_jet, Mollifier};
use crate::smooth::{DerivativeOracle, Jet};

/// Anything a generalized function can be paired against: a smooth function
/// of compact support, given through its Taylor coefficients.
pub trait Weight: Send + Sync {
    /// `w^(k)(at)/k!` for `k = 0..=order`.
    fn taylor(&self, at: f64, order: usize) -> Vec<Complex64>;

    fn value(&self, x: f64) -> Complex64 {
        self.taylor(x, 0)[0]
    }

    /// A closed interval outside of which the weight vanishes.
    fn support(&self) -> (f64, f64);
}

fn normalized_cumulative() -> &'static Mollifier {
    static STEP: OnceLock<Mollifier> = OnceLock::new();
    STEP.get_or_init(|| Mollifier::construct(0).expect("order-0 kernel"))
}

/// Smooth monotone step: 0 for `y ≤ -1`, 1 for `y ≥ 1`.
fn step_jet(y: f64, order: usize) -> Jet {
    let zero = Complex64::new(0.0, 0.0);
    if y <= -1.0 {
        return Jet::constant(zero, order);
    }
    if y >= 1.0 {
        return Jet::constant(Complex64::new(1.0, 0.0), order);
    }
    let c = normalized_cumulative().cumulative_taylor(y, order);
    Jet::from_coeffs(c.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
}

/// Rescales jet coefficients for the substitution `y = a x + b`.
fn chain_affine(j: Jet, a: f64) -> Jet {
    let mut ak = 1.0;
    Jet::from_coeffs(
        j.coeffs()
            .iter()
            .map(|c| {
                let v = c * ak;
                ak *= a;
                v
            })
            .collect(),
    )
}

/// Compactly supported test functions.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `d^deriv/dx^deriv [P(y) exp(-1/(1-y²))]` with `y = (x - center)/radius`.
    PolyBump {
        poly: Vec<f64>,
        center: f64,
        radius: f64,
        deriv: usize,
    },
    /// Derivative of a plateau that equals 1 on `[a, b]` and vanishes outside
    /// `[a - ramp, b + ramp]`.
    Plateau {
        a: f64,
        b: f64,
        ramp: f64,
        deriv: usize,
    },
}

impl TestFunction {
    pub fn poly_bump(poly: Vec<f64>, center: f64, radius: f64) -> Self {
        TestFunction::PolyBump {
            poly,
            center,
            radius,
            deriv: 0,
        }
    }

    pub fn plateau(a: f64, b: f64, ramp: f64) -> Self {
        TestFunction::Plateau {
            a,
            b,
            ramp,
            deriv: 0,
        }
    }

    pub fn derivative(&self) -> Self {
        let mut d = self.clone();
        match &mut d {
            TestFunction::PolyBump { deriv, .. } | TestFunction::Plateau { deriv, .. } => {
                *deriv += 1
            }
        }
        d
    }

    fn deriv(&self) -> usize {
        match self {
            TestFunction::PolyBump { deriv, .. } | TestFunction::Plateau { deriv, .. } => *deriv,
        }
    }

    fn base_jet(&self, x: f64, order: usize) -> Jet {
        match self {
            TestFunction::PolyBump {
                poly,
                center,
                radius,
                ..
            } => {
                let y = (x - center) / radius;
                let b = bump_jet(y, order);
                let yv = Jet::variable(Complex64::new(y, 0.0), order);
                let mut p = Jet::constant(Complex64::new(0.0, 0.0), order);
                for c in poly.iter().rev() {
                    p = &(&p * &yv) + &Jet::constant(Complex64::new(*c, 0.0), order);
                }
                chain_affine(&p * &b, 1.0 / radius)
            }
            TestFunction::Plateau { a, b, ramp, .. } => {
                let rise = chain_affine(step_jet(2.0 * (x - a) / ramp + 1.0, order), 2.0 / ramp);
                let fall = chain_affine(step_jet(1.0 - 2.0 * (x - b) / ramp, order), -2.0 / ramp);
                &rise * &fall
            }
        }
    }

    /// The analytic continuation of an undifferentiated poly-bump, valid for
    /// `|z - center| < radius`.
    pub fn analytic(&self, z: Complex64) -> Option<Complex64> {
        match self {
            TestFunction::PolyBump {
                poly,
                center,
                radius,
                deriv: 0,
            } => {
                let y = (z - center) / radius;
                let p = poly
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c);
                Some(p * (-(Complex64::new(1.0, 0.0) - y * y).inv()).exp())
            }
            _ => None,
        }
    }
}

impl Weight for TestFunction {
    fn taylor(&self, at: f64, order: usize) -> Vec<Complex64> {
        let d = self.deriv();
        let (lo, hi) = self.support();
        if at <= lo || at >= hi {
            return vec![Complex64::new(0.0, 0.0); order + 1];
        }
        self.base_jet(at, order + d).differentiate(d).into_coeffs()
    }

    fn value(&self, x: f64) -> Complex64 {
        match self {
            TestFunction::PolyBump {
                poly,
                center,
                radius,
                deriv: 0,
            } => {
                let y = (x - center) / radius;
                let p = poly.iter().rev().fold(0.0, |acc, c| acc * y + c);
                Complex64::new(p * bump(y), 0.0)
            }
            _ => self.taylor(x, 0)[0],
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::PolyBump { center, radius, .. } => (center - radius, center + radius),
            TestFunction::Plateau { a, b, ramp, .. } => (a - ramp, b + ramp),
        }
    }
}

/// `window(x) * f(x)` for a smooth (possibly complex) `f`, e.g. `e^{-zt}` cut
/// off outside a neighbourhood of the region of interest.
pub struct Windowed {
    pub window: TestFunction,
    pub f: Arc<dyn DerivativeOracle>,
}

impl Weight for Windowed {
    fn taylor(&self, at: f64, order: usize) -> Vec<Complex64> {
        let w = Jet::from_coeffs(self.window.taylor(at, order));
        let f = self
            .f
            .taylor(Complex64::new(at, 0.0), order)
            .map(Jet::from_coeffs)
            .unwrap_or_else(|_| Jet::constant(Complex64::new(f64::NAN, 0.0), order));
        (&w * &f).into_coeffs()
    }

    fn support(&self) -> (f64, f64) {
        self.window.support()
    }
}

/// A seeded family of random poly-bump test functions inside `(lo, hi)`.
pub fn battery(size: usize, seed: u64, domain: (f64, f64)) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = domain.0.max(-6.0);
    let hi = domain.1.min(6.0);
    let (c_lo, c_hi) = if domain.0.is_infinite() && domain.1.is_infinite() {
        (-2.0, 3.0)
    } else {
        (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
    };
    (0..size)
        .map(|_| {
            let center = rng.random_range(c_lo..c_hi);
            let room = (center - domain.0).min(domain.1 - center).min(4.0);
            let radius = room * rng.random_range(0.5..0.95);
            let poly = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            TestFunction::poly_bump(poly, center, radius)
        })
        .collect()
}
