use std::fmt;

use serde::Serialize;

use super::atom::{SingularKind, SmoothKind};
use super::normal::{expand, reduce, Reduced};
use super::testfn::TestFunction;
use super::GenFunction;
use crate::error::{Error, Result};
use crate::lc::{LcComplex, LcReal};

/// A closed real interval; `lo == hi` is a point. Endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExternalPiece {
    pub lo: f64,
    pub hi: f64,
}

/// An LC interval `[lo, hi]`; `None` is unbounded on that side.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalPiece {
    pub lo: Option<LcReal>,
    pub hi: Option<LcReal>,
}

impl InternalPiece {
    pub fn contains(&self, x: &LcReal) -> bool {
        let above = self.lo.as_ref().is_none_or(|lo| (x - lo).signum() >= 0);
        let below = self.hi.as_ref().is_none_or(|hi| (hi - x).signum() >= 0);
        above && below
    }
}

/// External support (a subset of `Ω`) and internal support (a subset of the
/// monad of `Ω`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SupportInfo {
    pub external: Vec<ExternalPiece>,
    pub internal: Vec<InternalPiece>,
}

impl SupportInfo {
    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    /// Smallest closed interval containing the external support.
    pub fn hull(&self) -> Option<(f64, f64)> {
        let lo = self.external.iter().map(|p| p.lo).reduce(f64::min)?;
        let hi = self.external.iter().map(|p| p.hi).reduce(f64::max)?;
        Some((lo, hi))
    }

    pub fn is_compact(&self) -> bool {
        self.hull().is_some_and(|(lo, hi)| lo.is_finite() && hi.is_finite())
    }

    fn push(&mut self, ext: ExternalPiece, int: InternalPiece) {
        if !self.external.contains(&ext) {
            self.external.push(ext);
        }
        if !self.internal.contains(&int) {
            self.internal.push(int);
        }
    }
}

impl fmt::Display for ExternalPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{{{}}}", self.lo)
        } else {
            let l = if self.lo.is_finite() { format!("[{}", self.lo) } else { "(-inf".into() };
            let r = if self.hi.is_finite() { format!("{}]", self.hi) } else { "inf)".into() };
            write!(f, "{l}, {r}")
        }
    }
}

impl fmt::Display for InternalPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => write!(f, "[{lo}, {hi}]"),
            (Some(lo), None) => write!(f, "{{x >= {lo}}}"),
            (None, Some(hi)) => write!(f, "{{x <= {hi}}}"),
            (None, None) => write!(f, "everything"),
        }
    }
}

impl fmt::Display for SupportInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext: Vec<String> = self.external.iter().map(|p| p.to_string()).collect();
        let int: Vec<String> = self.internal.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "external: {}; internal: {}",
            if ext.is_empty() { "empty".into() } else { ext.join(" u ") },
            if int.is_empty() { "empty".into() } else { int.join(" u ") }
        )
    }
}

pub(crate) fn support(f: &GenFunction) -> Result<SupportInfo> {
    let alg = f.algebra();
    let ctx = alg.ctx();
    let (dlo, dhi) = alg.domain();
    let s = LcReal::scale(ctx);
    let mut info = SupportInfo::default();
    let exact = |x: f64| LcReal::constant(x, ctx);
    for mono in expand(f.node(), ctx) {
        let reduced = reduce(&mono.singular)?;
        match reduced {
            Reduced::Zero => {}
            Reduced::Point { loc, width, .. } => {
                let c = loc.standard_part()?;
                let r = s.scale_by(width);
                info.push(
                    ExternalPiece { lo: c, hi: c },
                    InternalPiece {
                        lo: Some(&loc - &r),
                        hi: Some(&loc + &r),
                    },
                );
            }
            Reduced::Half { loc, width } => {
                let c = loc.standard_part()?;
                info.push(
                    ExternalPiece { lo: c, hi: dhi },
                    InternalPiece {
                        lo: Some(&loc - &s.scale_by(width)),
                        hi: None,
                    },
                );
            }
            Reduced::Cluster {
                reference,
                atoms,
                has_delta,
            } => {
                let c = reference.standard_part()?;
                let deltas = atoms.iter().filter(|a| a.kind != SingularKind::Heaviside);
                let lo = if has_delta {
                    deltas.clone().map(|a| a.eta - a.width).fold(f64::NEG_INFINITY, f64::max)
                } else {
                    atoms.iter().map(|a| a.eta - a.width).fold(f64::INFINITY, f64::min)
                };
                let hi = deltas.map(|a| a.eta + a.width).fold(f64::INFINITY, f64::min);
                info.push(
                    ExternalPiece {
                        lo: c,
                        hi: if has_delta { c } else { dhi },
                    },
                    InternalPiece {
                        lo: Some(&reference + &s.scale_by(lo)),
                        hi: has_delta.then(|| &reference + &s.scale_by(hi)),
                    },
                );
            }
            Reduced::Plain => {
                let (mut lo, mut hi) = (dlo, dhi);
                for a in &mono.smooth {
                    match &a.kind {
                        SmoothKind::Expr(_) => {}
                        SmoothKind::Oracle(o) => {
                            let (p, q) = o.x_support().ok_or_else(|| {
                                Error::Unsupported(format!(
                                    "no support description for smooth factor {}",
                                    o.label
                                ))
                            })?;
                            let shift = a.shift.standard_part()?;
                            lo = lo.max(p + shift);
                            hi = hi.min(q + shift);
                        }
                    }
                }
                if lo < hi {
                    info.push(
                        ExternalPiece { lo, hi },
                        InternalPiece {
                            lo: lo.is_finite().then(|| exact(lo)),
                            hi: hi.is_finite().then(|| exact(hi)),
                        },
                    );
                }
            }
        }
    }
    Ok(info)
}

pub(crate) fn integral_compact(f: &GenFunction) -> Result<LcComplex> {
    let alg = f.algebra();
    let info = support(f)?;
    let Some((lo, hi)) = info.hull() else {
        return Ok(LcComplex::zero(alg.ctx()));
    };
    let (dlo, dhi) = alg.domain();
    if !(lo.is_finite() && hi.is_finite() && dlo < lo && hi < dhi) {
        return Err(Error::Support(format!(
            "external support {info} is not compact in ({dlo}, {dhi})"
        )));
    }
    let room = (lo - dlo).min(dhi - hi);
    let pad = (room / 3.0).min(0.5);
    let gamma = TestFunction::plateau(lo - pad, hi + pad, pad);
    f.pairing(&gamma)
}
