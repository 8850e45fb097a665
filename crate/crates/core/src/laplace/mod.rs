//! The Laplace transform on `dom(L̂)`: classical exponential-polynomial parts
//! plus generalized parts whose internal support lies in `[s, ∞)`.
//!
//! Images are finite sums `Σ R_j(z) e^{-a_j z}` with rational `R_j` over `Ĉ`.
//! [`inverse_transform`] goes back through partial fractions, and
//! [`solve_ivp`] combines both directions with a verification in the algebra.
//! [`audit_classical`] replays the textbook table for comparison.

mod audit;
mod classical;
mod image;
mod ivp;
mod poly;
mod roots;

pub use audit::{
    audit_classical, classical_table, AuditSpec, AuditVerdict, ContradictionReport, RhsAtom, Ruleset,
    Violation, RULE_DELTA, RULE_DELTA_N, RULE_FIRST_DERIVATIVE, RULE_SECOND_DERIVATIVE,
    RULE_SHIFTED_DELTA,
};
pub use classical::{ClassicalFn, DomainElement, Oscillation};
pub use image::{
    check_membership, inverse_transform, transform, transform_classical, transform_derivative_shifted,
    transform_generalized, ImageTerm, LaplaceImage,
};
pub use ivp::{solve_ivp, EqualityMode, IvpSolution, IvpSpec};
pub use poly::Poly;
pub use roots::{roots, Root};

use serde::Serialize;

use crate::error::Result;
use crate::gf::{Algebra, Verdict};

/// Both sides of the equivalence `f ≅ g ⇔ L̂f = L̂g` for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceCheck {
    pub weak: Verdict,
    pub images_equal: bool,
}

impl EquivalenceCheck {
    pub fn agree(&self) -> bool {
        matches!(
            (self.weak, self.images_equal),
            (Verdict::True, true) | (Verdict::False, false)
        )
    }
}

/// Compares weak equality of `f` and `g` in the algebra (battery on the whole
/// line) with term-level equality of their transforms.
pub fn check_transform_equivalence(f: &DomainElement, g: &DomainElement, alg: &Algebra) -> Result<EquivalenceCheck> {
    let weak = f.to_gen(alg)?.weak_equal(&g.to_gen(alg)?);
    let images_equal = transform(f, alg.ctx())?.equals(&transform(g, alg.ctx())?);
    Ok(EquivalenceCheck { weak, images_equal })
}
