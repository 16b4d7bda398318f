//! Cross-checks topology enumeration against a brute-force filter over all
//! families of subsets.

use std::collections::BTreeSet;

use vd_core::topo::finite::full_mask;
use vd_core::topo::enumerate_topologies;

/// Every family of subsets of `{0..n-1}` containing the empty set and the
/// carrier and closed under pairwise union and intersection.
fn brute_force(n: usize) -> BTreeSet<Vec<u64>> {
    let full = full_mask(n);
    let inner: Vec<u64> = (1..full).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << inner.len()) {
        let mut family = vec![0, full];
        family.extend(inner.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &s)| s));
        let members: BTreeSet<u64> = family.iter().copied().collect();
        let closed = family
            .iter()
            .all(|a| family.iter().all(|b| members.contains(&(a | b)) && members.contains(&(a & b))));
        if closed {
            out.insert(members.into_iter().collect());
        }
    }
    out
}

fn enumerated(n: usize) -> BTreeSet<Vec<u64>> {
    enumerate_topologies(n, 4).unwrap().map(|t| t.opens().to_vec()).collect()
}

#[test]
fn counts_match_known_values() {
    let counts: Vec<usize> = (1..=4).map(|n| enumerate_topologies(n, 4).unwrap().count()).collect();
    assert_eq!(counts, vec![1, 4, 29, 355]);
}

#[test]
fn enumeration_agrees_with_brute_force() {
    for n in 1..=4 {
        let expected = brute_force(n);
        let got = enumerated(n);
        assert_eq!(got, expected, "n = {n}");
        assert_eq!(enumerate_topologies(n, 4).unwrap().count(), expected.len(), "duplicates at n = {n}");
    }
}

#[test]
fn enumeration_order_is_stable() {
    let a: Vec<_> = enumerate_topologies(3, 4).unwrap().collect();
    let b: Vec<_> = enumerate_topologies(3, 4).unwrap().collect();
    assert_eq!(a, b);
}
