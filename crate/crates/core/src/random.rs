//! Random formulas, models and derivations for property suites and fuzzing.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{expand_defs, instantiate, Formula};
use crate::hilbert::{Derivation, Justification};
use crate::semantics::{EvalError, Model, Program, Valuation};
use crate::topo::finite::{full_mask, random_space};
use crate::topo::{Bound, Interval, IntervalSet, PointSet, Space};

pub const DEFAULT_VARS: [&str; 3] = ["p", "q", "r"];

/// A random formula of at most the given depth.
pub fn formula<R: Rng + ?Sized>(rng: &mut R, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::var(*vars.choose(rng).expect("at least one variable"));
    }
    let sub = |rng: &mut R| formula(rng, vars, depth - 1);
    match rng.gen_range(0..7) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::imp(sub(rng), sub(rng)),
        3 => Formula::neg(sub(rng)),
        4 => Formula::circ(sub(rng)),
        5 => Formula::class_neg(sub(rng)),
        _ => Formula::bot(sub(rng)),
    }
}

/// Small rationals with denominators 1 or 2 in `[-4, 4]`.
fn rational<R: Rng + ?Sized>(rng: &mut R) -> Rational64 {
    Rational64::new(rng.gen_range(-8..=8), 2)
}

pub fn interval_set<R: Rng + ?Sized>(rng: &mut R) -> IntervalSet {
    let k = rng.gen_range(0..=3);
    let parts = (0..k).filter_map(|_| {
        let mut a = rational(rng);
        let mut b = rational(rng);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let lo = if rng.gen_bool(0.15) { Bound::NegInf } else { Bound::Finite(a) };
        let hi = if rng.gen_bool(0.15) { Bound::PosInf } else { Bound::Finite(b) };
        Interval::new(lo, rng.gen_bool(0.5), hi, rng.gen_bool(0.5)).ok()
    });
    IntervalSet::from_intervals(parts.collect::<Vec<_>>())
}

pub fn point_set<R: Rng + ?Sized>(rng: &mut R, space: &Space) -> PointSet {
    match space {
        Space::Finite(t) => PointSet::finite(t.n(), rng.gen::<u64>() & full_mask(t.n())),
        Space::Real => PointSet::Real(interval_set(rng)),
    }
}

/// A random finite space with between 0 and `max_points` points.
pub fn finite_space<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Space {
    let n = rng.gen_range(0..=max_points);
    Space::Finite(random_space(rng, n))
}

/// A model on `space` interpreting every variable of `formulas`, with random
/// admissible values for (roughly half of) their disjunctions.
pub fn model<R: Rng + ?Sized>(rng: &mut R, space: Space, formulas: &[Formula]) -> Result<Model, EvalError> {
    let mut vars = BTreeMap::new();
    for f in formulas {
        for v in f.variables() {
            if let std::collections::btree_map::Entry::Vacant(slot) = vars.entry(v) {
                slot.insert(point_set(rng, &space));
            }
        }
    }
    let prog = Program::compile(formulas);
    let mut chosen: BTreeMap<Formula, PointSet> = BTreeMap::new();
    prog.run_with(&space, &vars, |key, lower| {
        if let Some(v) = chosen.get(key) {
            return Ok(v.clone());
        }
        let v = if rng.gen_bool(0.5) {
            lower.union(&point_set(rng, &space))?
        } else {
            lower.clone()
        };
        chosen.insert(key.clone(), v.clone());
        Ok(v)
    })?;
    let mut valuation = Valuation::new();
    valuation.vars = vars;
    for (key, value) in chosen {
        valuation.set_disjunction(&key, value)?;
    }
    Model::new(space, valuation)
}

/// Generates a derivation of roughly `len` lines that the checker accepts.
///
/// Lines are hypotheses, axiom instances (often built from earlier lines so
/// that modus ponens becomes applicable), modus ponens, rule 2 on
/// hypothesis-free lines and definitional expansions.
pub fn derivation<R: Rng + ?Sized>(rng: &mut R, len: usize, vars: &[&str]) -> Derivation {
    let hyp_count = rng.gen_range(0..=2);
    let hypotheses: Vec<Formula> = (0..hyp_count).map(|_| formula(rng, vars, 2)).collect();
    let mut d = Derivation::new(hypotheses);
    let mut flags: Vec<bool> = Vec::new();

    while d.lines.len() < len {
        let (f, just, flag) = match rng.gen_range(0..10) {
            0 if !d.hypotheses.is_empty() => {
                let h = d.hypotheses.choose(rng).expect("non-empty").clone();
                (h, Justification::Hyp, false)
            }
            1..=4 => match mp_candidate(rng, &d) {
                Some((i, j, c)) => (c, Justification::Mp(i, j), flags[i] && flags[j]),
                None => axiom_line(rng, &d, vars),
            },
            5 => match (0..d.lines.len()).filter(|&i| flags[i] && d.lines[i].formula.size() <= 12).collect::<Vec<_>>().choose(rng) {
                Some(&i) => {
                    let a = d.lines[i].formula.clone();
                    let f = Formula::imp(Formula::neg(a.clone()), Formula::class_neg(a));
                    (f, Justification::Rule2(i), true)
                }
                None => axiom_line(rng, &d, vars),
            },
            6 => match (0..d.lines.len()).filter(|&i| d.lines[i].formula.contains_class_neg()).collect::<Vec<_>>().choose(rng) {
                Some(&i) => {
                    let w = Formula::var(*vars.choose(rng).expect("variables"));
                    let f = expand_defs(&d.lines[i].formula, &w);
                    (f, Justification::Defn(i, w), flags[i])
                }
                None => axiom_line(rng, &d, vars),
            },
            _ => axiom_line(rng, &d, vars),
        };
        d.push(f, just);
        flags.push(flag);
    }
    d
}

fn axiom_line<R: Rng + ?Sized>(rng: &mut R, d: &Derivation, vars: &[&str]) -> (Formula, Justification, bool) {
    let id = rng.gen_range(1..=18u8);
    let args: Vec<Formula> = (0..3)
        .map(|_| {
            let reuse = d.lines.iter().filter(|l| l.formula.size() <= 10).collect::<Vec<_>>();
            match reuse.choose(rng) {
                Some(line) if rng.gen_bool(0.6) => line.formula.clone(),
                _ => formula(rng, vars, 2),
            }
        })
        .collect();
    let f = instantiate(id, &args).expect("schema id in range");
    (f, Justification::Axiom(id), true)
}

fn mp_candidate<R: Rng + ?Sized>(rng: &mut R, d: &Derivation) -> Option<(usize, usize, Formula)> {
    let mut found = Vec::new();
    for (j, lj) in d.lines.iter().enumerate() {
        if let Formula::Imp(a, c) = &lj.formula {
            for (i, li) in d.lines.iter().enumerate() {
                if li.formula == **a && !d.lines.iter().any(|l| l.formula == **c) {
                    found.push((i, j, (**c).clone()));
                }
            }
        }
    }
    found.choose(rng).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::check;
    use crate::semantics::eval_all;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_derivations_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d = derivation(&mut rng, 30, &DEFAULT_VARS);
            let r = check(&d);
            assert!(r.accepted, "{:?}", r.first_error);
        }
    }

    #[test]
    fn random_models_satisfy_disjunction_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let fs: Vec<Formula> = (0..3).map(|_| formula(&mut rng, &DEFAULT_VARS, 4)).collect();
            let space = if rng.gen_bool(0.2) { Space::Real } else { finite_space(&mut rng, 4) };
            let m = model(&mut rng, space, &fs).unwrap();
            eval_all(&m, &fs).unwrap();
            m.check_disjunctions().unwrap();
        }
    }
}
