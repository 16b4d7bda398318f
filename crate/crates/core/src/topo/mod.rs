//! Topological carriers: finite spaces and the real line.

pub mod finite;
pub mod interval;
pub mod kuratowski;

use std::fmt;

use thiserror::Error;

pub use finite::{enumerate_topologies, FiniteSpace};
pub use interval::{Bound, Interval, IntervalSet};
pub use kuratowski::{check_kuratowski, extend_kuratowski, KuratowskiLike};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TopoError {
    #[error("point sets live on different carriers")]
    CarrierMismatch,
    #[error("the family of opens must contain the empty set")]
    MissingEmpty,
    #[error("the family of opens must contain the whole carrier")]
    MissingCarrier,
    #[error("set {0:#b} mentions a point outside the carrier")]
    PointOutOfRange(u64),
    #[error("opens not closed under union: {0:#b} ∪ {1:#b}")]
    NotUnionClosed(u64, u64),
    #[error("opens not closed under intersection: {0:#b} ∩ {1:#b}")]
    NotIntersectionClosed(u64, u64),
    #[error("{0} points exceeds the supported maximum")]
    TooManyPoints(usize),
    #[error("topology enumeration on {n} points exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid Kuratowski-like operator: {0}")]
    InvalidKuratowskiLike(kuratowski::KuratowskiLikeClause),
}

/// A subset of a carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointSet {
    Finite { n: usize, bits: u64 },
    Real(IntervalSet),
}

impl PointSet {
    pub fn finite(n: usize, bits: u64) -> Self {
        PointSet::Finite { n, bits }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PointSet::Finite { bits, .. } => *bits == 0,
            PointSet::Real(s) => s.is_empty(),
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self, TopoError> {
        match (self, other) {
            (PointSet::Finite { n, bits: a }, PointSet::Finite { n: m, bits: b }) if n == m => {
                Ok(PointSet::finite(*n, a | b))
            }
            (PointSet::Real(a), PointSet::Real(b)) => Ok(PointSet::Real(a.union(b))),
            _ => Err(TopoError::CarrierMismatch),
        }
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, TopoError> {
        match (self, other) {
            (PointSet::Finite { n, bits: a }, PointSet::Finite { n: m, bits: b }) if n == m => {
                Ok(PointSet::finite(*n, a & b))
            }
            (PointSet::Real(a), PointSet::Real(b)) => Ok(PointSet::Real(a.intersection(b))),
            _ => Err(TopoError::CarrierMismatch),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            PointSet::Finite { n, bits } => PointSet::finite(*n, !bits & finite::full_mask(*n)),
            PointSet::Real(s) => PointSet::Real(s.complement()),
        }
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, TopoError> {
        match (self, other) {
            (PointSet::Finite { n, bits: a }, PointSet::Finite { n: m, bits: b }) if n == m => {
                Ok(finite::is_subset(*a, *b))
            }
            (PointSet::Real(a), PointSet::Real(b)) => Ok(a.is_subset(b)),
            _ => Err(TopoError::CarrierMismatch),
        }
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSet::Finite { bits, .. } => {
                f.write_str("{")?;
                for (k, p) in finite::members(*bits).enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("}")
            }
            PointSet::Real(s) => write!(f, "{s}"),
        }
    }
}

/// A topological space: a finite space or the real line with its usual
/// topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Space {
    Finite(FiniteSpace),
    Real,
}

impl Space {
    pub fn full(&self) -> PointSet {
        match self {
            Space::Finite(t) => PointSet::finite(t.n(), t.full()),
            Space::Real => PointSet::Real(IntervalSet::real_line()),
        }
    }

    pub fn empty(&self) -> PointSet {
        match self {
            Space::Finite(t) => PointSet::finite(t.n(), 0),
            Space::Real => PointSet::Real(IntervalSet::empty()),
        }
    }

    pub fn owns(&self, s: &PointSet) -> bool {
        match (self, s) {
            (Space::Finite(t), PointSet::Finite { n, bits }) => t.n() == *n && finite::is_subset(*bits, t.full()),
            (Space::Real, PointSet::Real(_)) => true,
            _ => false,
        }
    }

    pub fn closure(&self, s: &PointSet) -> Result<PointSet, TopoError> {
        match (self, s) {
            (Space::Finite(t), PointSet::Finite { n, bits }) if t.n() == *n => {
                Ok(PointSet::finite(*n, t.closure(*bits)))
            }
            (Space::Real, PointSet::Real(s)) => Ok(PointSet::Real(s.closure())),
            _ => Err(TopoError::CarrierMismatch),
        }
    }

    pub fn interior(&self, s: &PointSet) -> Result<PointSet, TopoError> {
        match (self, s) {
            (Space::Finite(t), PointSet::Finite { n, bits }) if t.n() == *n => {
                Ok(PointSet::finite(*n, t.interior(*bits)))
            }
            (Space::Real, PointSet::Real(s)) => Ok(PointSet::Real(s.interior())),
            _ => Err(TopoError::CarrierMismatch),
        }
    }
}
