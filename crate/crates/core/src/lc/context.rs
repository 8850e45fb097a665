use serde::{Deserialize, Serialize};

use super::Exponent;
use crate::error::{Error, Result};

/// Default largest retained exponent.
pub const DEFAULT_Q_MAX: i64 = 6;
/// Default floor below which arithmetic results are treated as zero.
pub const DEFAULT_COEFF_FLOOR: f64 = 1e-30;

/// Where series are cut off and how floating-point dust is pruned.
///
/// Every value records the context it was built in; binary operations require
/// both operands to share it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationContext {
    #[serde(with = "exponent_string")]
    pub q_max: Exponent,
    pub coeff_floor: f64,
}

impl TruncationContext {
    pub fn new(q_max: Exponent, coeff_floor: f64) -> Result<Self> {
        if q_max.is_negative() {
            return Err(Error::Options(format!("q_max must be >= 0, got {q_max}")));
        }
        if !(coeff_floor >= 0.0) {
            return Err(Error::Options(format!(
                "coeff_floor must be >= 0, got {coeff_floor}"
            )));
        }
        Ok(TruncationContext { q_max, coeff_floor })
    }

    pub fn with_q_max(q_max: Exponent) -> Result<Self> {
        Self::new(q_max, DEFAULT_COEFF_FLOOR)
    }

    /// Same floor, retaining `extra` more exponent range. Used for
    /// intermediate results that are later multiplied by negative powers of `s`.
    pub fn widened(&self, extra: &Exponent) -> Self {
        TruncationContext {
            q_max: &self.q_max + extra,
            coeff_floor: self.coeff_floor,
        }
    }
}

impl Default for TruncationContext {
    fn default() -> Self {
        TruncationContext {
            q_max: Exponent::integer(DEFAULT_Q_MAX),
            coeff_floor: DEFAULT_COEFF_FLOOR,
        }
    }
}

mod exponent_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Exponent;

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&e.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_settings() {
        assert!(TruncationContext::new(Exponent::integer(-1), 0.0).is_err());
        assert!(TruncationContext::new(Exponent::integer(2), -1.0).is_err());
        assert!(TruncationContext::new(Exponent::integer(0), 0.0).is_ok());
    }

    #[test]
    fn defaults() {
        let ctx = TruncationContext::default();
        assert_eq!(ctx.q_max, Exponent::integer(6));
        assert_eq!(ctx.coeff_floor, 1e-30);
    }
}
