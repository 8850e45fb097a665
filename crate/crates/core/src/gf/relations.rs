use std::fmt;

use serde::Serialize;

use super::GenFunction;
use crate::error::Result;

const BATTERY_TOL: f64 = 1e-8;

/// Outcome of a semi-decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    /// The normal form and the test battery disagree, or neither could be computed.
    Undetermined,
}

impl Verdict {
    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Undetermined => "undetermined",
        })
    }
}

fn battery_zero(d: &GenFunction) -> Result<bool> {
    let functional = d.functional()?;
    for tau in d.algebra().battery() {
        if functional.pair(&tau)?.max_abs_coefficient() > BATTERY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn weak_equal(f: &GenFunction, g: &GenFunction) -> Verdict {
    let d = f - g;
    let normal = d.functional().and_then(|fun| fun.is_weak_zero());
    match (normal, battery_zero(&d)) {
        (Ok(true), Ok(true)) => Verdict::True,
        (Ok(false), Ok(false)) => Verdict::False,
        _ => Verdict::Undetermined,
    }
}

pub(crate) fn associated(f: &GenFunction, g: &GenFunction) -> Result<bool> {
    let d = f - g;
    let functional = d.functional()?;
    for tau in d.algebra().battery() {
        let p = functional.pair(&tau)?;
        let bad = p.exponents().into_iter().any(|q| {
            !q.is_positive() && p.coefficient(&q).norm() > BATTERY_TOL
        });
        if bad {
            return Ok(false);
        }
    }
    Ok(true)
}
