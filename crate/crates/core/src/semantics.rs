//! Topological valuations with a partially determined disjunction.
//!
//! Every connective except `|` is computed from the values of its operands.
//! A disjunction `a | b` takes any value containing `v(a) ∪ v(b)`; the model
//! carries an explicit table for the disjunctions whose value is larger than
//! that union, and every other disjunction gets the union itself.
//!
//! Disjunction entries are keyed by the formula itself, not by operand values,
//! so two different disjunctions with equal operand values may legitimately
//! differ. Keys are taken modulo the abbreviation `~g := g -> bot(w)` (see
//! [`contract_defs`]) because `~` is a defined connective: `~p | r` and
//! `(p -> bot(q)) | r` are one and the same disjunction.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{contract_defs, expand_defs, Formula};
use crate::topo::{PointSet, Space, TopoError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` has no value")]
    UnboundVariable(String),
    #[error("disjunction `{0}` is assigned a value that does not contain the union of its operands")]
    OracleConstraintViolated(Formula),
    #[error("`{0}` is not a disjunction")]
    NotADisjunction(Formula),
    #[error("value for `{0}` does not live on the model's carrier")]
    ForeignSet(String),
    #[error(transparent)]
    Topo(#[from] TopoError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub vars: BTreeMap<String, PointSet>,
    disjunctions: BTreeMap<Formula, PointSet>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_var(mut self, name: &str, value: PointSet) -> Self {
        self.vars.insert(name.to_string(), value);
        self
    }

    /// Records an explicit value for a disjunction. Whether the value
    /// contains the union of the operands is only known at evaluation time.
    pub fn set_disjunction(&mut self, f: &Formula, value: PointSet) -> Result<(), EvalError> {
        let key = contract_defs(f);
        if !matches!(key, Formula::Or(..)) {
            return Err(EvalError::NotADisjunction(f.clone()));
        }
        self.disjunctions.insert(key, value);
        Ok(())
    }

    pub fn with_disjunction(mut self, f: &Formula, value: PointSet) -> Result<Self, EvalError> {
        self.set_disjunction(f, value)?;
        Ok(self)
    }

    pub fn disjunction(&self, f: &Formula) -> Option<&PointSet> {
        self.disjunctions.get(&contract_defs(f))
    }

    /// Explicit disjunction entries, keyed by their canonical form.
    pub fn disjunctions(&self) -> &BTreeMap<Formula, PointSet> {
        &self.disjunctions
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub space: Space,
    pub valuation: Valuation,
}

impl Model {
    /// Checks that every value lives on `space`.
    pub fn new(space: Space, valuation: Valuation) -> Result<Self, EvalError> {
        for (name, set) in &valuation.vars {
            if !space.owns(set) {
                return Err(EvalError::ForeignSet(name.clone()));
            }
        }
        for (f, set) in &valuation.disjunctions {
            if !space.owns(set) {
                return Err(EvalError::ForeignSet(f.to_string()));
            }
        }
        Ok(Model { space, valuation })
    }

    /// Verifies every explicit disjunction entry against its operands.
    pub fn check_disjunctions(&self) -> Result<(), EvalError> {
        for f in self.valuation.disjunctions.keys() {
            eval(self, f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Op {
    Var(String),
    And(usize, usize),
    Or(usize, usize, Formula),
    Imp(usize, usize),
    Neg(usize),
    Circ(usize),
    ClassNeg(usize),
}

/// A set of formulas flattened into a shared DAG, children before parents.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
}

impl Program {
    pub fn compile(formulas: &[Formula]) -> Self {
        let mut index: HashMap<Formula, usize> = HashMap::new();
        let mut ops = Vec::new();
        let roots = formulas.iter().map(|f| Self::node(f, &mut index, &mut ops)).collect();
        Program { ops, roots }
    }

    fn node(f: &Formula, index: &mut HashMap<Formula, usize>, ops: &mut Vec<Op>) -> usize {
        if let Some(&i) = index.get(f) {
            return i;
        }
        let mut go = |g: &Formula| Self::node(g, index, ops);
        let op = match f {
            Formula::Var(v) => Op::Var(v.clone()),
            Formula::And(a, b) => Op::And(go(a), go(b)),
            Formula::Or(a, b) => Op::Or(go(a), go(b), contract_defs(f)),
            Formula::Imp(a, b) => Op::Imp(go(a), go(b)),
            Formula::Neg(a) => Op::Neg(go(a)),
            Formula::Circ(a) => Op::Circ(go(a)),
            Formula::ClassNeg(a) => Op::ClassNeg(go(a)),
        };
        ops.push(op);
        index.insert(f.clone(), ops.len() - 1);
        ops.len() - 1
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub(crate) fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Node index of the `k`-th compiled formula.
    pub fn root(&self, k: usize) -> usize {
        self.roots[k]
    }

    /// Canonical keys of the disjunction nodes, in evaluation order.
    pub fn disjunction_keys(&self) -> impl Iterator<Item = &Formula> {
        self.ops.iter().filter_map(|op| match op {
            Op::Or(_, _, key) => Some(key),
            _ => None,
        })
    }

    /// Evaluates every node. `disj(key, lower)` supplies the value of a
    /// disjunction whose operands' union is `lower`.
    pub fn run_with<F>(&self, space: &Space, vars: &BTreeMap<String, PointSet>, mut disj: F) -> Result<Vec<PointSet>, EvalError>
    where
        F: FnMut(&Formula, &PointSet) -> Result<PointSet, EvalError>,
    {
        let mut vals: Vec<PointSet> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Var(name) => vars.get(name).cloned().ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
                Op::And(a, b) => vals[*a].intersection(&vals[*b])?,
                Op::Or(a, b, key) => {
                    let lower = vals[*a].union(&vals[*b])?;
                    disj(key, &lower)?
                }
                Op::Imp(a, b) => vals[*a].complement().union(&vals[*b])?,
                Op::Neg(a) => space.closure(&vals[*a].complement())?,
                Op::Circ(a) => vals[*a].complement().union(&space.interior(&vals[*a])?)?,
                Op::ClassNeg(a) => vals[*a].complement(),
            };
            vals.push(v);
        }
        Ok(vals)
    }

    pub fn run(&self, m: &Model) -> Result<Vec<PointSet>, EvalError> {
        self.run_with(&m.space, &m.valuation.vars, |key, lower| {
            match m.valuation.disjunctions.get(key) {
                Some(entry) => {
                    if lower.is_subset(entry)? {
                        Ok(entry.clone())
                    } else {
                        Err(EvalError::OracleConstraintViolated(key.clone()))
                    }
                }
                None => Ok(lower.clone()),
            }
        })
    }
}

pub fn eval(m: &Model, f: &Formula) -> Result<PointSet, EvalError> {
    let prog = Program::compile(std::slice::from_ref(f));
    let mut vals = prog.run(m)?;
    Ok(vals.swap_remove(prog.root(0)))
}

/// Values of several formulas under one model.
pub fn eval_all(m: &Model, fs: &[Formula]) -> Result<Vec<PointSet>, EvalError> {
    let prog = Program::compile(fs);
    let vals = prog.run(m)?;
    Ok((0..fs.len()).map(|k| vals[prog.root(k)].clone()).collect())
}

pub fn is_true(m: &Model, f: &Formula) -> Result<bool, EvalError> {
    Ok(eval(m, f)? == m.space.full())
}

/// `v(a) ⊆ v(b)`.
pub fn implication_test(m: &Model, a: &Formula, b: &Formula) -> Result<bool, EvalError> {
    let vals = eval_all(m, &[a.clone(), b.clone()])?;
    Ok(vals[0].is_subset(&vals[1])?)
}

/// Intersection of the values of `gamma` (the carrier for an empty list).
pub fn meet(m: &Model, gamma: &[Formula]) -> Result<PointSet, EvalError> {
    let vals = eval_all(m, gamma)?;
    vals.iter().try_fold(m.space.full(), |acc, v| Ok(acc.intersection(v)?))
}

/// `a` is true, or `gamma` is non-empty and its meet lies inside `v(a)`.
pub fn consequence_in_model(m: &Model, gamma: &[Formula], a: &Formula) -> Result<bool, EvalError> {
    let va = eval(m, a)?;
    if va == m.space.full() {
        return Ok(true);
    }
    if gamma.is_empty() {
        return Ok(false);
    }
    Ok(meet(m, gamma)?.is_subset(&va)?)
}

/// Whether `~f` and its definitional expansion with `witness` agree.
pub fn macro_consistency(m: &Model, f: &Formula, witness: &Formula) -> Result<bool, EvalError> {
    let neg = Formula::class_neg(f.clone());
    let vals = eval_all(m, &[neg.clone(), expand_defs(&neg, witness)])?;
    Ok(vals[0] == vals[1])
}
