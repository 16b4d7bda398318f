//! Finite unions of intervals of the real line with exact rational endpoints.
//!
//! Boolean operations and the topological operators work on a common grid:
//! the sorted finite endpoints `q_0 < ... < q_{k-1}` of all operands split the
//! line into `2k + 1` elementary pieces (`(-inf, q_0)`, `{q_0}`, `(q_0, q_1)`,
//! ..., `(q_{k-1}, +inf)`), each of which is either inside or outside every
//! operand. Results are rebuilt from piece membership, which makes the output
//! canonical.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rational64),
    PosInf,
}

impl Bound {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Bound::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("interval is empty")]
    Empty,
    #[error("lower bound +inf or upper bound -inf")]
    MisplacedInfinity,
    #[error("invalid rational `{0}`")]
    BadRational(String),
    #[error("cannot parse interval set `{0}`")]
    Syntax(String),
}

/// A non-empty interval. Infinite ends are always open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Bound,
    lo_open: bool,
    hi: Bound,
    hi_open: bool,
}

impl Interval {
    pub fn new(lo: Bound, lo_open: bool, hi: Bound, hi_open: bool) -> Result<Self, IntervalError> {
        if lo == Bound::PosInf || hi == Bound::NegInf {
            return Err(IntervalError::MisplacedInfinity);
        }
        let lo_open = lo_open || lo == Bound::NegInf;
        let hi_open = hi_open || hi == Bound::PosInf;
        match lo.cmp(&hi) {
            Ordering::Greater => return Err(IntervalError::Empty),
            Ordering::Equal if lo_open || hi_open => return Err(IntervalError::Empty),
            _ => {}
        }
        Ok(Interval { lo, lo_open, hi, hi_open })
    }

    pub fn lo(&self) -> Bound {
        self.lo
    }

    pub fn hi(&self) -> Bound {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn contains(&self, x: Rational64) -> bool {
        let x = Bound::Finite(x);
        let above = if self.lo_open { self.lo < x } else { self.lo <= x };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// Whether the open gap `(a, b)` lies inside the interval. `None` stands
    /// for the corresponding infinity.
    fn covers_gap(&self, a: Option<Rational64>, b: Option<Rational64>) -> bool {
        let a = a.map_or(Bound::NegInf, Bound::Finite);
        let b = b.map_or(Bound::PosInf, Bound::Finite);
        self.lo <= a && b <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", fmt_bound(self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            fmt_bound(self.lo),
            fmt_bound(self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

fn fmt_bound(b: Bound) -> String {
    match b {
        Bound::NegInf => "-inf".into(),
        Bound::PosInf => "+inf".into(),
        Bound::Finite(q) => fmt_rational(q),
    }
}

pub fn fmt_rational(q: Rational64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"`, `"p/q"`, `"-inf"`, `"inf"` / `"+inf"`.
pub fn parse_bound(s: &str) -> Result<Bound, IntervalError> {
    match s.trim() {
        "-inf" | "-∞" => Ok(Bound::NegInf),
        "inf" | "+inf" | "∞" | "+∞" => Ok(Bound::PosInf),
        t => parse_rational(t).map(Bound::Finite),
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64, IntervalError> {
    let bad = || IntervalError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

/// Canonical finite union of pairwise disjoint, non-adjacent intervals,
/// sorted by lower bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn real_line() -> Self {
        IntervalSet {
            intervals: vec![Interval { lo: Bound::NegInf, lo_open: true, hi: Bound::PosInf, hi_open: true }],
        }
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalSet { intervals: vec![i] }
    }

    /// Union of arbitrary (possibly overlapping) intervals.
    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let raw = IntervalSet { intervals: intervals.into_iter().collect() };
        let grid = Grid::of(&[&raw]);
        let m = grid.membership(&raw);
        grid.rebuild(&m)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_real_line(&self) -> bool {
        *self == Self::real_line()
    }

    pub fn contains(&self, x: Rational64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn complement(&self) -> Self {
        let grid = Grid::of(&[self]);
        let m: Vec<bool> = grid.membership(self).into_iter().map(|b| !b).collect();
        grid.rebuild(&m)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let grid = Grid::of(&[self, other]);
        let a = grid.membership(self);
        let b = grid.membership(other);
        let m: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| op(x, y)).collect();
        grid.rebuild(&m)
    }

    /// Topological closure in the usual topology: adds every finite endpoint
    /// adjacent to a piece of the set.
    pub fn closure(&self) -> Self {
        let grid = Grid::of(&[self]);
        let m = grid.membership(self);
        let mut out = m.clone();
        for p in (1..m.len()).step_by(2) {
            out[p] = m[p - 1] || m[p] || m[p + 1];
        }
        grid.rebuild(&out)
    }

    /// Topological interior: drops every point not surrounded on both sides.
    pub fn interior(&self) -> Self {
        let grid = Grid::of(&[self]);
        let m = grid.membership(self);
        let mut out = m.clone();
        for p in (1..m.len()).step_by(2) {
            out[p] = m[p - 1] && m[p] && m[p + 1];
        }
        grid.rebuild(&out)
    }

    /// Finite endpoints, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<Rational64> {
        let mut pts: Vec<Rational64> = self
            .intervals
            .iter()
            .flat_map(|i| [i.lo.finite(), i.hi.finite()])
            .flatten()
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

/// Elementary pieces induced by a sorted list of points. Piece `2i + 1` is
/// the point `points[i]`; even pieces are the open gaps between them.
struct Grid {
    points: Vec<Rational64>,
}

impl Grid {
    fn of(sets: &[&IntervalSet]) -> Self {
        let mut points: Vec<Rational64> = sets.iter().flat_map(|s| s.endpoints()).collect();
        points.sort();
        points.dedup();
        Grid { points }
    }

    fn gap(&self, g: usize) -> (Option<Rational64>, Option<Rational64>) {
        let a = if g == 0 { None } else { Some(self.points[g - 1]) };
        (a, self.points.get(g).copied())
    }

    fn membership(&self, set: &IntervalSet) -> Vec<bool> {
        let k = self.points.len();
        let mut out = Vec::with_capacity(2 * k + 1);
        for g in 0..=k {
            let (a, b) = self.gap(g);
            out.push(set.intervals.iter().any(|i| i.covers_gap(a, b)));
            if g < k {
                out.push(set.contains(self.points[g]));
            }
        }
        out
    }

    fn rebuild(&self, m: &[bool]) -> IntervalSet {
        let mut intervals = Vec::new();
        let mut p = 0;
        while p < m.len() {
            if !m[p] {
                p += 1;
                continue;
            }
            let start = p;
            while p + 1 < m.len() && m[p + 1] {
                p += 1;
            }
            let (lo, lo_open) = if start % 2 == 1 {
                (Bound::Finite(self.points[start / 2]), false)
            } else {
                (self.gap(start / 2).0.map_or(Bound::NegInf, Bound::Finite), true)
            };
            let (hi, hi_open) = if p % 2 == 1 {
                (Bound::Finite(self.points[p / 2]), false)
            } else {
                (self.gap(p / 2).1.map_or(Bound::PosInf, Bound::Finite), true)
            };
            intervals.push(Interval { lo, lo_open, hi, hi_open });
            p += 1;
        }
        IntervalSet { intervals }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Parses the notation produced by `Display`, e.g. `(-inf, 0] u [1, inf)`,
/// `{0}` or `{}`. `R` denotes the whole line.
impl FromStr for IntervalSet {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "{}" || s == "∅" {
            return Ok(IntervalSet::empty());
        }
        if s == "R" || s == "ℝ" {
            return Ok(IntervalSet::real_line());
        }
        let syntax = || IntervalError::Syntax(s.to_string());
        let mut parts = Vec::new();
        for piece in s.split(['u', '∪']) {
            let piece = piece.trim();
            let first = piece.chars().next().ok_or_else(syntax)?;
            let last = piece.chars().last().ok_or_else(syntax)?;
            let inner = &piece[first.len_utf8()..piece.len() - last.len_utf8()];
            let interval = match (first, last) {
                ('{', '}') => {
                    let q = Bound::Finite(parse_rational(inner)?);
                    Interval::new(q, false, q, false)?
                }
                ('(' | '[', ')' | ']') => {
                    let (lo, hi) = inner.split_once(',').ok_or_else(syntax)?;
                    Interval::new(parse_bound(lo)?, first == '(', parse_bound(hi)?, last == ')')?
                }
                _ => return Err(syntax()),
            };
            parts.push(interval);
        }
        Ok(IntervalSet::from_intervals(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> IntervalSet {
        text.parse().unwrap()
    }

    #[test]
    fn complement_of_half_open_unit() {
        assert_eq!(s("[0,1)").complement(), s("(-inf,0) u [1,inf)"));
        assert_eq!(IntervalSet::empty().complement(), IntervalSet::real_line());
    }

    #[test]
    fn adjacent_pieces_merge() {
        assert_eq!(s("[0,1) u [1,2)"), s("[0,2)"));
        assert_eq!(s("[0,1) u [1,2)").intervals().len(), 1);
        assert_eq!(s("(0,1) u (1,2)").intervals().len(), 2);
        assert_eq!(s("(0,1) u {1}"), s("(0,1]"));
        assert_eq!(s("[0,3] u (1,2)"), s("[0,3]"));
    }

    #[test]
    fn closure_and_interior() {
        assert_eq!(s("(-inf,0) u [1,inf)").closure(), s("(-inf,0] u [1,inf)"));
        assert_eq!(s("[0,1)").interior(), s("(0,1)"));
        assert_eq!(s("{0}").interior(), IntervalSet::empty());
        assert_eq!(s("(0,1) u (1,2)").closure(), s("[0,2]"));
        assert_eq!(s("(-inf,0) u (0,inf)").closure(), IntervalSet::real_line());
    }

    #[test]
    fn display_round_trips() {
        for text in ["(-inf, 0] u [1, +inf)", "{0}", "{}", "[1/2, 3/4) u (2, 3)"] {
            let set = s(text);
            assert_eq!(set.to_string(), text);
            assert_eq!(s(&set.to_string()), set);
        }
    }

    #[test]
    fn interval_validation() {
        let one = Bound::Finite(Rational64::from_integer(1));
        assert_eq!(Interval::new(one, true, one, false), Err(IntervalError::Empty));
        assert_eq!(Interval::new(Bound::PosInf, true, one, false), Err(IntervalError::MisplacedInfinity));
        let i = Interval::new(Bound::NegInf, false, one, false).unwrap();
        assert!(i.lo_open());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational("2/4").unwrap(), Rational64::new(1, 2));
    }
}
