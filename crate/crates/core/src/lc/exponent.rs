use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational exponent of the scale `s`.
///
/// Always kept in lowest terms with a positive denominator, so `Eq` and `Ord`
/// are exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn zero() -> Self {
        Exponent(BigRational::zero())
    }

    pub fn one() -> Self {
        Exponent(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Exponent(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator in exponent");
        Exponent(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Exponent(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Integer value when the exponent is integral and fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Largest integer `k` with `k * self <= bound`, for a positive `self`.
    pub fn max_multiple_within(&self, bound: &Exponent) -> Option<usize> {
        if !self.is_positive() {
            return None;
        }
        if bound.is_negative() {
            return Some(0);
        }
        let q = (&bound.0 / &self.0).floor();
        q.to_integer().to_usize()
    }

    pub fn scale_int(&self, k: i64) -> Exponent {
        Exponent(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    pub fn div_int(&self, k: i64) -> Exponent {
        assert!(k != 0, "division of exponent by zero");
        Exponent(&self.0 / BigRational::from_integer(BigInt::from(k)))
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Exponent {
    /// `"p"` for integers, `"p/q"` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Options(format!("not a rational exponent: {text:?}"));
        let text = text.trim();
        match text.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Exponent(BigRational::new(p, q)))
            }
            None => {
                let p: BigInt = text.parse().map_err(|_| bad())?;
                Ok(Exponent(BigRational::from_integer(p)))
            }
        }
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::integer(n)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Exponent> for Exponent {
    fn add_assign(&mut self, rhs: &Exponent) {
        self.0 += &rhs.0;
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 - &rhs.0)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-&self.0)
    }
}

impl<'a> Mul<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn mul(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 * &rhs.0)
    }
}

impl<'a> Div<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn div(self, rhs: &Exponent) -> Exponent {
        assert!(!rhs.is_zero(), "division of exponent by zero");
        Exponent(&self.0 / &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_display() {
        assert_eq!(Exponent::ratio(2, 4), Exponent::ratio(1, 2));
        assert_eq!(Exponent::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Exponent::ratio(-6, 3).to_string(), "-2");
        assert_eq!(Exponent::ratio(3, -4).to_string(), "-3/4");
    }

    #[test]
    fn parse_round_trip() {
        for text in ["0", "1", "-7", "1/2", "-3/4", "10/3"] {
            let e: Exponent = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
        }
        assert!("1/0".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
    }

    #[test]
    fn exact_ordering() {
        assert!(Exponent::ratio(1, 3) < Exponent::ratio(1, 2));
        assert!(Exponent::integer(-1) < Exponent::zero());
        assert_eq!(
            Exponent::ratio(1, 2).max_multiple_within(&Exponent::integer(6)),
            Some(12)
        );
        assert_eq!(
            Exponent::ratio(2, 3).max_multiple_within(&Exponent::integer(1)),
            Some(1)
        );
    }
}
