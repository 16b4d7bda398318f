//! Kuratowski closure operators on finite powersets and the extension of a
//! Kuratowski-like operator on a union-closed family to the whole powerset.

use std::collections::BTreeMap;

use thiserror::Error;

use super::finite::{full_mask, is_subset, FiniteSpace};
use super::TopoError;

/// Largest carrier for which closure maps over the full powerset are built.
pub const MAX_CLOSURE_POINTS: usize = 12;

/// A failed closure-operator law together with the offending sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KuratowskiViolation {
    /// 1: `cl(∅) = ∅`, 2: extensive, 3: additive, 4: idempotent.
    pub clause: u8,
    pub a: u64,
    pub b: Option<u64>,
}

/// Finds the first violated law of a map given on every subset of
/// `{0..n-1}` (`cl[s]` is the image of the bitset `s`).
pub fn kuratowski_violation(n: usize, cl: &[u64]) -> Option<KuratowskiViolation> {
    let size = 1usize << n;
    assert_eq!(cl.len(), size, "closure map must cover the powerset");
    let v = |clause, a: usize, b: Option<usize>| KuratowskiViolation { clause, a: a as u64, b: b.map(|b| b as u64) };
    if cl[0] != 0 {
        return Some(v(1, 0, None));
    }
    if let Some(a) = (0..size).find(|&a| !is_subset(a as u64, cl[a])) {
        return Some(v(2, a, None));
    }
    for a in 0..size {
        for b in a + 1..size {
            if cl[a | b] != cl[a] | cl[b] {
                return Some(v(3, a, Some(b)));
            }
        }
    }
    let full = full_mask(n);
    if let Some(a) = (0..size).find(|&a| cl[a] > full || cl[cl[a] as usize] != cl[a]) {
        return Some(v(4, a, None));
    }
    None
}

pub fn check_kuratowski(n: usize, cl: &[u64]) -> bool {
    kuratowski_violation(n, cl).is_none()
}

/// Which precondition of a Kuratowski-like operator failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum KuratowskiLikeClause {
    #[error("the family must contain the empty set and the carrier")]
    MissingEmptyOrFull,
    #[error("the family is not closed under union ({0:#b} ∪ {1:#b})")]
    NotUnionClosed(u64, u64),
    #[error("hat is not defined on {0:#b} or maps it outside the family")]
    NotAMap(u64),
    #[error("hat(∅) ≠ ∅")]
    EmptyNotFixed,
    #[error("{0:#b} ⊄ hat({0:#b})")]
    NotExtensive(u64),
    #[error("hat({0:#b} ∪ {1:#b}) ≠ hat({0:#b}) ∪ hat({1:#b})")]
    NotAdditive(u64, u64),
    #[error("hat(hat({0:#b})) ≠ hat({0:#b})")]
    NotIdempotent(u64),
}

/// A map `hat` on a union-closed family of subsets of `{0..n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiLike {
    pub n: usize,
    pub hat: BTreeMap<u64, u64>,
}

impl KuratowskiLike {
    pub fn new(n: usize, hat: impl IntoIterator<Item = (u64, u64)>) -> Self {
        KuratowskiLike { n, hat: hat.into_iter().collect() }
    }

    pub fn base(&self) -> impl Iterator<Item = u64> + '_ {
        self.hat.keys().copied()
    }

    pub fn validate(&self) -> Result<(), KuratowskiLikeClause> {
        use KuratowskiLikeClause::*;
        let full = full_mask(self.n);
        let hat = &self.hat;
        if !hat.contains_key(&0) || !hat.contains_key(&full) {
            return Err(MissingEmptyOrFull);
        }
        let base: Vec<u64> = self.base().collect();
        for (i, &f) in base.iter().enumerate() {
            for &g in &base[i + 1..] {
                if !hat.contains_key(&(f | g)) {
                    return Err(NotUnionClosed(f, g));
                }
            }
        }
        if let Some(&f) = base.iter().find(|f| !hat.contains_key(&hat[f]) || !is_subset(**f, full)) {
            return Err(NotAMap(f));
        }
        if hat[&0] != 0 {
            return Err(EmptyNotFixed);
        }
        if let Some(&f) = base.iter().find(|f| !is_subset(**f, hat[f])) {
            return Err(NotExtensive(f));
        }
        for (i, &f) in base.iter().enumerate() {
            for &g in &base[i + 1..] {
                if hat[&(f | g)] != hat[&f] | hat[&g] {
                    return Err(NotAdditive(f, g));
                }
            }
        }
        if let Some(&f) = base.iter().find(|f| hat[&hat[f]] != hat[f]) {
            return Err(NotIdempotent(f));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureExtension {
    /// `closure[s]` for every bitset `s` of the powerset.
    pub closure: Vec<u64>,
    /// The topology whose closed sets are the fixed points of `closure`.
    pub space: FiniteSpace,
}

/// Extends `k` to the whole powerset by
/// `cl(A) = ⋂ { hat(F) : F ∈ B, A ⊆ hat(F) }`.
pub fn extend_kuratowski(k: &KuratowskiLike) -> Result<ClosureExtension, TopoError> {
    if k.n > MAX_CLOSURE_POINTS {
        return Err(TopoError::TooManyPoints(k.n));
    }
    k.validate().map_err(TopoError::InvalidKuratowskiLike)?;
    let full = full_mask(k.n);
    let mut images: Vec<u64> = k.hat.values().copied().collect();
    images.sort_unstable();
    images.dedup();

    let closure: Vec<u64> = (0..=full)
        .map(|a| {
            images
                .iter()
                .filter(|&&h| is_subset(a, h))
                .fold(full, |acc, h| acc & h)
        })
        .collect();
    let opens = (0..=full).filter(|&s| closure[s as usize] == s).map(|c| !c & full);
    let space = FiniteSpace::new(k.n, opens)?;
    Ok(ClosureExtension { closure, space })
}

/// The closure map of a finite space over its whole powerset.
pub fn closure_map(space: &FiniteSpace) -> Vec<u64> {
    assert!(space.n() <= MAX_CLOSURE_POINTS);
    (0..=space.full()).map(|s| space.closure(s)).collect()
}
