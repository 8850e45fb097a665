use std::fmt;

use serde::{Serialize, Serializer};

use super::Exponent;

/// The valuation `v(x)`: leading exponent, or infinity for zero.
///
/// `Finite(_) < Infinite`, so `min` and comparisons follow the usual
/// conventions of valuation theory.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Exponent),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// `e^{-v}`, the sharp-topology absolute value.
    pub fn ultra_norm(&self) -> f64 {
        match self {
            Valuation::Finite(e) => (-e.to_f64()).exp(),
            Valuation::Infinite => 0.0,
        }
    }

    /// `v(x) + v(y)` with the convention `∞ + a = ∞`.
    pub fn add(&self, other: &Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Size class of a scalar relative to the standard reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Magnitude {
    /// Zero, or `|x| < 1/n` for every `n`.
    Infinitesimal,
    /// Finite but not infinitesimal.
    FiniteNonInfinitesimal,
    /// `|x| > n` for every `n`.
    Infinite,
}

impl Magnitude {
    pub fn of(v: &Valuation) -> Magnitude {
        match v {
            Valuation::Infinite => Magnitude::Infinitesimal,
            Valuation::Finite(e) if e.is_positive() => Magnitude::Infinitesimal,
            Valuation::Finite(e) if e.is_zero() => Magnitude::FiniteNonInfinitesimal,
            Valuation::Finite(_) => Magnitude::Infinite,
        }
    }
}
