//! Finite topological spaces with subsets encoded as `u64` bitsets.

use rand::Rng;

use super::TopoError;

/// Largest supported carrier.
pub const MAX_POINTS: usize = 64;

/// Default cap for [`enumerate_topologies`].
pub const DEFAULT_ENUM_CAP: usize = 4;

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Members of a bitset in increasing order.
pub fn members(bits: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| bits >> i & 1 == 1)
}

pub fn from_members(points: impl IntoIterator<Item = usize>) -> u64 {
    points.into_iter().fold(0, |acc, p| acc | 1 << p)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    n: usize,
    /// Sorted, deduplicated.
    opens: Vec<u64>,
}

impl FiniteSpace {
    /// Validates the topology axioms for a finite family.
    pub fn new(n: usize, opens: impl IntoIterator<Item = u64>) -> Result<Self, TopoError> {
        if n > MAX_POINTS {
            return Err(TopoError::TooManyPoints(n));
        }
        let full = full_mask(n);
        let mut opens: Vec<u64> = opens.into_iter().collect();
        if let Some(&bad) = opens.iter().find(|&&o| !is_subset(o, full)) {
            return Err(TopoError::PointOutOfRange(bad));
        }
        opens.sort_unstable();
        opens.dedup();
        if opens.binary_search(&0).is_err() {
            return Err(TopoError::MissingEmpty);
        }
        if opens.binary_search(&full).is_err() {
            return Err(TopoError::MissingCarrier);
        }
        for (i, &a) in opens.iter().enumerate() {
            for &b in &opens[i + 1..] {
                if opens.binary_search(&(a | b)).is_err() {
                    return Err(TopoError::NotUnionClosed(a, b));
                }
                if opens.binary_search(&(a & b)).is_err() {
                    return Err(TopoError::NotIntersectionClosed(a, b));
                }
            }
        }
        Ok(FiniteSpace { n, opens })
    }

    pub fn discrete(n: usize) -> Self {
        assert!(n <= 16, "discrete topology limited to 16 points");
        FiniteSpace { n, opens: (0..=full_mask(n)).collect() }
    }

    pub fn indiscrete(n: usize) -> Self {
        let mut opens = vec![0, full_mask(n)];
        opens.dedup();
        FiniteSpace { n, opens }
    }

    /// The topology of up-sets of a preorder given as `up[i]` = points above
    /// `i` (each containing `i`).
    fn from_preorder(up: &[u64]) -> Self {
        let n = up.len();
        let opens = (0..=full_mask(n))
            .filter(|&s| members(s).all(|i| is_subset(up[i], s)))
            .collect();
        FiniteSpace { n, opens }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn is_open(&self, s: u64) -> bool {
        self.opens.binary_search(&s).is_ok()
    }

    pub fn closed_sets(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.opens.iter().map(|o| !o & self.full()).collect();
        out.sort_unstable();
        out
    }

    pub fn complement(&self, s: u64) -> u64 {
        !s & self.full()
    }

    /// Union of the open subsets of `s`.
    pub fn interior(&self, s: u64) -> u64 {
        self.opens
            .iter()
            .filter(|&&o| is_subset(o, s))
            .fold(0, |acc, o| acc | o)
    }

    /// Intersection of the closed supersets of `s`.
    pub fn closure(&self, s: u64) -> u64 {
        let full = self.full();
        self.opens
            .iter()
            .map(|o| !o & full)
            .filter(|&c| is_subset(s, c))
            .fold(full, |acc, c| acc & c)
    }
}

/// Every topology on `n` points, each exactly once.
///
/// Topologies on a finite set correspond one-to-one to preorders (the
/// specialization order), so the stream walks all reflexive relations and
/// keeps the transitive ones.
pub fn enumerate_topologies(n: usize, cap: usize) -> Result<impl Iterator<Item = FiniteSpace>, TopoError> {
    if n > cap {
        return Err(TopoError::CapExceeded { n, cap });
    }
    // off-diagonal pairs (i, j), i != j
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let count: u64 = 1 << pairs.len();
    Ok((0..count).filter_map(move |mask| {
        let mut up: Vec<u64> = (0..n).map(|i| 1 << i).collect();
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| members(up[i]).all(|j| is_subset(up[j], up[i])));
        transitive.then(|| FiniteSpace::from_preorder(&up))
    }))
}

/// A random topology on `n` points (not uniformly distributed): a random
/// relation closed to a preorder.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteSpace {
    assert!(n <= 16, "random spaces limited to 16 points");
    let density: f64 = rng.gen_range(0.0..0.6);
    let mut up: Vec<u64> = (0..n).map(|i| 1 << i).collect();
    for (i, row) in up.iter_mut().enumerate() {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                *row |= 1 << j;
            }
        }
    }
    // transitive closure
    loop {
        let mut changed = false;
        for i in 0..n {
            let reach = members(up[i]).fold(up[i], |acc, j| acc | up[j]);
            if reach != up[i] {
                up[i] = reach;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    FiniteSpace::from_preorder(&up)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> FiniteSpace {
        FiniteSpace::new(3, [0, 0b001, 0b011, 0b111]).unwrap()
    }

    #[test]
    fn operators_on_chain() {
        let t = chain3();
        assert_eq!(t.interior(0b010), 0);
        assert_eq!(t.closure(0b101), 0b111);
        assert_eq!(t.closure(0b100), 0b100);
        assert_eq!(t.interior(0b011), 0b011);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(FiniteSpace::new(2, [0b11]), Err(TopoError::MissingEmpty));
        assert_eq!(FiniteSpace::new(2, [0, 0b01]), Err(TopoError::MissingCarrier));
        assert_eq!(FiniteSpace::new(2, [0, 0b100, 0b11]), Err(TopoError::PointOutOfRange(0b100)));
        assert!(matches!(
            FiniteSpace::new(3, [0, 0b001, 0b010, 0b111]),
            Err(TopoError::NotUnionClosed(0b001, 0b010))
        ));
        assert!(matches!(
            FiniteSpace::new(3, [0, 0b011, 0b110, 0b111]),
            Err(TopoError::NotIntersectionClosed(0b011, 0b110))
        ));
    }

    #[test]
    fn empty_carrier() {
        let t = FiniteSpace::new(0, [0]).unwrap();
        assert_eq!(t.full(), 0);
        assert_eq!(t.closure(0), 0);
        assert_eq!(enumerate_topologies(0, 4).unwrap().count(), 1);
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_topologies(1, 4).unwrap().count(), 1);
        assert_eq!(enumerate_topologies(2, 4).unwrap().count(), 4);
        assert!(matches!(enumerate_topologies(5, 4), Err(TopoError::CapExceeded { n: 5, cap: 4 })));
    }

    #[test]
    fn random_spaces_are_topologies() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(0..=5);
            let t = random_space(&mut rng, n);
            assert!(FiniteSpace::new(n, t.opens().iter().copied()).is_ok());
        }
    }
}
