//! Bounded countermodel search over finite topologies, the real-line
//! witnesses separating vD from explosive logics, the replacement-failure
//! witness and the soundness fuzzer.
//!
//! The search never turns "nothing found" into a validity claim: absence only
//! means that no countermodel exists within the budget.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::formula::{parse, Formula};
use crate::hilbert::{self, Derivation};
use crate::random;
use crate::semantics::{eval_all, meet, EvalError, Model, Op, Program, Valuation};
use crate::topo::{enumerate_topologies, FiniteSpace, IntervalSet, PointSet, Space};

/// Hard cap on the number of points the search will enumerate.
pub const MAX_SEARCH_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_points: usize,
    /// Values tried per disjunction, the least admissible one first.
    pub max_oracle_candidates: usize,
    /// Leaf valuations examined per topology before giving up.
    pub max_steps_per_space: u64,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_points: 4,
            max_oracle_candidates: 8,
            max_steps_per_space: 2_000_000,
            time_limit: None,
        }
    }
}

impl SearchBudget {
    pub fn with_max_points(mut self, n: usize) -> Self {
        self.max_points = n;
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        let bad = |what: &str| Err(SearchError::InvalidBudget(what.to_string()));
        if self.max_points == 0 || self.max_points > MAX_SEARCH_POINTS {
            return bad("max_points must be between 1 and 5");
        }
        if self.max_oracle_candidates == 0 {
            return bad("max_oracle_candidates must be positive");
        }
        if self.max_steps_per_space == 0 {
            return bad("max_steps_per_space must be positive");
        }
        if self.time_limit == Some(Duration::ZERO) {
            return bad("time_limit must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    RefutesValidity,
    RefutesEntailment,
}

/// A replayable countermodel.
///
/// For an entailment `gamma ⊨ target` with non-empty `gamma`, `model` has a
/// point in the meet of `gamma` outside `target`, and `validity_model` makes
/// `target` untrue (the two may coincide). No finite sub-list of `gamma` can
/// then have its meet inside `target` in every model, and `target` is not
/// valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub kind: ReportKind,
    pub gamma: Vec<Formula>,
    pub target: Formula,
    pub model: Model,
    pub validity_model: Option<Model>,
    pub values: BTreeMap<Formula, PointSet>,
    pub budget: Option<SearchBudget>,
}

impl CounterexampleReport {
    fn build(kind: ReportKind, gamma: Vec<Formula>, target: Formula, model: Model, extra: &[Formula]) -> Result<Self, EvalError> {
        let mut keys: Vec<Formula> = gamma.clone();
        keys.push(target.clone());
        keys.extend_from_slice(extra);
        let vals = eval_all(&model, &keys)?;
        let values = keys.into_iter().zip(vals).collect();
        let validity_model = (kind == ReportKind::RefutesEntailment).then(|| model.clone());
        Ok(CounterexampleReport { kind, gamma, target, model, validity_model, values, budget: None })
    }

    /// Re-evaluates the stored model: every stored value must reproduce and
    /// the refutation must still hold.
    pub fn replay(&self) -> Result<bool, EvalError> {
        let keys: Vec<Formula> = self.values.keys().cloned().collect();
        let vals = eval_all(&self.model, &keys)?;
        if keys.iter().zip(&vals).any(|(k, v)| self.values[k] != *v) {
            return Ok(false);
        }
        let full = self.model.space.full();
        let target = crate::semantics::eval(&self.model, &self.target)?;
        Ok(match self.kind {
            ReportKind::RefutesValidity => target != full,
            ReportKind::RefutesEntailment => {
                let escapes = !meet(&self.model, &self.gamma)?.is_subset(&target)?;
                let untrue = match &self.validity_model {
                    Some(m) => crate::semantics::eval(m, &self.target)? != m.space.full(),
                    None => target != full,
                };
                escapes && untrue && !self.gamma.is_empty()
            }
        })
    }
}

/// Looks for a finite model in which `f` is not true.
pub fn refute_validity(f: &Formula, budget: &SearchBudget) -> Result<Option<CounterexampleReport>, SearchError> {
    search(&[], f, budget)
}

/// Looks for a finite certificate that `gamma` does not entail `a`. With an
/// empty `gamma` this is [`refute_validity`].
pub fn refute_entailment(gamma: &[Formula], a: &Formula, budget: &SearchBudget) -> Result<Option<CounterexampleReport>, SearchError> {
    search(gamma, a, budget)
}

fn search(gamma: &[Formula], target: &Formula, budget: &SearchBudget) -> Result<Option<CounterexampleReport>, SearchError> {
    budget.validate()?;
    let deadline = budget.time_limit.map(|t| std::time::Instant::now() + t);
    let mut all = gamma.to_vec();
    all.push(target.clone());
    let prog = Program::compile(&all);
    let vars: Vec<String> = all.iter().flat_map(|f| f.variables()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let problem = Problem::new(&prog, gamma.len(), &vars);

    for n in 1..=budget.max_points {
        let spaces: Vec<FiniteSpace> = enumerate_topologies(n, MAX_SEARCH_POINTS)
            .expect("n within cap")
            .collect();
        let run = |t: &FiniteSpace| problem.search_space(t, budget, deadline).transpose();
        #[cfg(feature = "parallel")]
        let hit = spaces.par_iter().find_map_first(run);
        #[cfg(not(feature = "parallel"))]
        let hit = spaces.iter().find_map(run);

        if let Some(found) = hit {
            let model = found?;
            let kind = if gamma.is_empty() { ReportKind::RefutesValidity } else { ReportKind::RefutesEntailment };
            let mut report = CounterexampleReport::build(kind, gamma.to_vec(), target.clone(), model, &[])?;
            report.budget = Some(budget.clone());
            return Ok(Some(report));
        }
    }
    Ok(None)
}

struct Problem<'a> {
    ops: &'a [Op],
    gamma: Vec<usize>,
    target: usize,
    vars: &'a [String],
    /// Variable position for `Var` ops.
    var_of: Vec<Option<usize>>,
    /// Disjunction key index for `Or` ops.
    key_of: Vec<Option<usize>>,
    keys: Vec<Formula>,
}

impl<'a> Problem<'a> {
    fn new(prog: &'a Program, gamma_len: usize, vars: &'a [String]) -> Self {
        let ops = prog.ops();
        let mut keys: Vec<Formula> = Vec::new();
        let mut key_of = Vec::with_capacity(ops.len());
        let mut var_of = Vec::with_capacity(ops.len());
        for op in ops {
            var_of.push(match op {
                Op::Var(v) => vars.iter().position(|x| x == v),
                _ => None,
            });
            key_of.push(match op {
                Op::Or(_, _, key) => Some(match keys.iter().position(|k| k == key) {
                    Some(i) => i,
                    None => {
                        keys.push(key.clone());
                        keys.len() - 1
                    }
                }),
                _ => None,
            });
        }
        Problem {
            ops,
            gamma: (0..gamma_len).map(|k| prog.root(k)).collect(),
            target: prog.root(gamma_len),
            vars,
            var_of,
            key_of,
            keys,
        }
    }

    fn search_space(
        &self,
        space: &FiniteSpace,
        budget: &SearchBudget,
        deadline: Option<std::time::Instant>,
    ) -> Result<Option<Model>, SearchError> {
        let n = space.n();
        let full = space.full();
        let table_len = 1usize << n;
        let mut generators: Vec<u64> = space.opens().iter().copied().chain(space.closed_sets()).collect();
        generators.sort_unstable();
        generators.dedup();
        let mut dfs = Dfs {
            problem: self,
            closure: (0..table_len as u64).map(|s| space.closure(s)).collect(),
            interior: (0..table_len as u64).map(|s| space.interior(s)).collect(),
            full,
            generators,
            max_candidates: budget.max_oracle_candidates,
            steps: 0,
            max_steps: budget.max_steps_per_space,
            deadline,
            var_vals: vec![0; self.vars.len()],
            vals: Vec::with_capacity(self.ops.len()),
            chosen: vec![None; self.keys.len()],
        };

        let assignments: u64 = 1u64.checked_shl((n * self.vars.len()) as u32).unwrap_or(0);
        let mut combo: u64 = 0;
        loop {
            for (k, v) in dfs.var_vals.iter_mut().enumerate() {
                *v = (combo >> (k * n)) & full;
            }
            if dfs.go(0)? {
                return Ok(Some(dfs.model(space)?));
            }
            combo += 1;
            if combo >= assignments {
                return Ok(None);
            }
        }
    }
}

struct Dfs<'p, 'a> {
    problem: &'p Problem<'a>,
    closure: Vec<u64>,
    interior: Vec<u64>,
    full: u64,
    generators: Vec<u64>,
    max_candidates: usize,
    steps: u64,
    max_steps: u64,
    deadline: Option<std::time::Instant>,
    var_vals: Vec<u64>,
    vals: Vec<u64>,
    /// (value, least admissible value) per disjunction key
    chosen: Vec<Option<(u64, u64)>>,
}

impl Dfs<'_, '_> {
    fn go(&mut self, pos: usize) -> Result<bool, SearchError> {
        let ops = self.problem.ops;
        if pos == ops.len() {
            return self.leaf();
        }
        let full = self.full;
        let v = |i: &usize, vals: &[u64]| vals[*i];
        let value = match &ops[pos] {
            Op::Var(_) => self.var_vals[self.problem.var_of[pos].expect("variable indexed")],
            Op::And(a, b) => v(a, &self.vals) & v(b, &self.vals),
            Op::Imp(a, b) => (!v(a, &self.vals) & full) | v(b, &self.vals),
            Op::Neg(a) => self.closure[(!v(a, &self.vals) & full) as usize],
            Op::Circ(a) => (!v(a, &self.vals) & full) | self.interior[v(a, &self.vals) as usize],
            Op::ClassNeg(a) => !v(a, &self.vals) & full,
            Op::Or(a, b, _) => {
                let lower = v(a, &self.vals) | v(b, &self.vals);
                let key = self.problem.key_of[pos].expect("disjunction indexed");
                if let Some((chosen, _)) = self.chosen[key] {
                    if lower & !chosen != 0 {
                        return Ok(false);
                    }
                    chosen
                } else {
                    for c in self.candidates(lower) {
                        self.chosen[key] = Some((c, lower));
                        self.vals.push(c);
                        if self.go(pos + 1)? {
                            return Ok(true);
                        }
                        self.vals.pop();
                    }
                    self.chosen[key] = None;
                    return Ok(false);
                }
            }
        };
        self.vals.push(value);
        if self.go(pos + 1)? {
            return Ok(true);
        }
        self.vals.pop();
        Ok(false)
    }

    fn candidates(&self, lower: u64) -> Vec<u64> {
        let mut out = vec![lower];
        for &g in &self.generators {
            if out.len() >= self.max_candidates {
                break;
            }
            let c = lower | g;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    fn leaf(&mut self) -> Result<bool, SearchError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(SearchError::BudgetExceeded(format!("more than {} valuations on one space", self.max_steps)));
        }
        if self.steps.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if std::time::Instant::now() > d {
                    return Err(SearchError::BudgetExceeded("time limit reached".into()));
                }
            }
        }
        let target = self.vals[self.problem.target];
        if self.problem.gamma.is_empty() {
            return Ok(target != self.full);
        }
        let meet = self.problem.gamma.iter().fold(self.full, |acc, &g| acc & self.vals[g]);
        Ok(meet & !target != 0)
    }

    fn model(&self, space: &FiniteSpace) -> Result<Model, SearchError> {
        let n = space.n();
        let mut valuation = Valuation::new();
        for (name, &bits) in self.problem.vars.iter().zip(&self.var_vals) {
            valuation.vars.insert(name.clone(), PointSet::finite(n, bits));
        }
        for (key, chosen) in self.problem.keys.iter().zip(&self.chosen) {
            if let Some((value, lower)) = chosen {
                if value != lower {
                    valuation.set_disjunction(key, PointSet::finite(n, *value))?;
                }
            }
        }
        Ok(Model::new(Space::Finite(space.clone()), valuation)?)
    }
}

// ---------------------------------------------------------------------------
// Real-line witnesses

fn f(text: &str) -> Formula {
    parse(text).expect("built-in formula parses")
}

fn real(text: &str) -> PointSet {
    PointSet::Real(text.parse::<IntervalSet>().expect("built-in interval set parses"))
}

/// The real-line model with `p = [0, 1)` and `q = (2, 3)`.
pub fn lfi_model() -> Model {
    let v = Valuation::new().with_var("p", real("[0, 1)")).with_var("q", real("(2, 3)"));
    Model::new(Space::Real, v).expect("real-line sets")
}

/// Countermodels for `{p, !p} ⊭ q`, `{@p, p} ⊭ q` and `{@p, !p} ⊭ q`, each
/// recording the value of the corresponding implication.
pub fn lfi_witnesses() -> [CounterexampleReport; 3] {
    let m = lfi_model();
    let shared = [f("p"), f("q"), f("!p"), f("@p")];
    let build = |gamma: &[&str], implication: &str| {
        let mut extra = shared.to_vec();
        extra.push(f(implication));
        CounterexampleReport::build(
            ReportKind::RefutesEntailment,
            gamma.iter().map(|g| f(g)).collect(),
            f("q"),
            m.clone(),
            &extra,
        )
        .expect("witness model evaluates")
    };
    [
        build(&["p", "!p"], "p -> (!p -> q)"),
        build(&["@p", "p"], "@p -> (p -> q)"),
        build(&["@p", "!p"], "@p -> (!p -> q)"),
    ]
}

/// Two interderivable formulas whose disjunctions with a third formula
/// receive different values in one model.
#[derive(Clone, Debug)]
pub struct ReplacementWitness {
    pub left: Formula,
    pub right: Formula,
    pub left_disjunction: Formula,
    pub right_disjunction: Formula,
    /// Corpus derivations of `right` from `left` and of `left` from `right`.
    pub derivations: [&'static str; 2],
    /// Refutes `{right | r} ⊨ left | r`.
    pub report: CounterexampleReport,
}

impl ReplacementWitness {
    /// Replays the report and re-establishes every claim: equal values for
    /// the interderivable pair, different admissible disjunction values,
    /// and both derivations checking.
    pub fn verify(&self) -> Result<bool, EvalError> {
        let m = &self.report.model;
        let fs = [self.left.clone(), self.right.clone(), self.left_disjunction.clone(), self.right_disjunction.clone()];
        let v = eval_all(m, &fs)?;
        let full = m.space.full();
        let derivations_check = self.derivations.iter().all(|name| {
            hilbert::corpus_entry(name).is_some_and(|e| hilbert::check(&e.derivation).accepted)
        });
        Ok(self.report.replay()?
            && v[0] == v[1]
            && v[0] != full
            && v[2] != v[3]
            && !v[3].is_subset(&v[2])?
            && v[2] != full
            && derivations_check)
    }
}

pub fn replacement_failure_witness() -> ReplacementWitness {
    let left = f("p & q");
    let right = f("q & p");
    let left_disjunction = f("(p & q) | r");
    let right_disjunction = f("(q & p) | r");
    let valuation = Valuation::new()
        .with_var("p", PointSet::finite(2, 0b01))
        .with_var("q", PointSet::finite(2, 0b01))
        .with_var("r", PointSet::finite(2, 0))
        .with_disjunction(&left_disjunction, PointSet::finite(2, 0b01))
        .and_then(|v| v.with_disjunction(&right_disjunction, PointSet::finite(2, 0b11)))
        .expect("disjunction keys");
    let model = Model::new(Space::Finite(FiniteSpace::discrete(2)), valuation).expect("finite sets");
    let report = CounterexampleReport::build(
        ReportKind::RefutesEntailment,
        vec![right_disjunction.clone()],
        left_disjunction.clone(),
        model,
        &[left.clone(), right.clone()],
    )
    .expect("witness model evaluates");
    ReplacementWitness {
        left,
        right,
        left_disjunction,
        right_disjunction,
        derivations: ["and-comm-lr", "and-comm-rl"],
        report,
    }
}

// ---------------------------------------------------------------------------
// Soundness fuzzing

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub iterations: usize,
    pub models_per_derivation: usize,
    pub max_points: usize,
    pub chain_len: usize,
}

impl FuzzConfig {
    pub fn new(seed: u64, iterations: usize) -> Self {
        FuzzConfig { seed, iterations, models_per_derivation: 100, max_points: 4, chain_len: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessViolation {
    /// Derivation truncated at the first line that fails in `model`.
    pub derivation: Derivation,
    pub model: Model,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub seed: u64,
    pub iterations: usize,
    pub derivations: usize,
    pub models: usize,
    pub line_checks: usize,
    pub violations: Vec<SoundnessViolation>,
}

pub fn fuzz_soundness(seed: u64, iterations: usize) -> FuzzReport {
    fuzz_soundness_with(&FuzzConfig::new(seed, iterations))
}

/// Samples accepted derivations (the corpus and random axiom/MP chains) and
/// random finite models, and checks that every line is a consequence of the
/// hypotheses in every model.
pub fn fuzz_soundness_with(cfg: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let corpus: Vec<Derivation> = hilbert::corpus()
        .into_values()
        .filter(|e| e.expect_reject.is_none())
        .map(|e| e.derivation)
        .collect();
    let mut report = FuzzReport {
        seed: cfg.seed,
        iterations: cfg.iterations,
        derivations: 0,
        models: 0,
        line_checks: 0,
        violations: Vec::new(),
    };

    for it in 0..cfg.iterations {
        let d = if it % 4 == 0 {
            corpus.choose(&mut rng).expect("corpus is non-empty").clone()
        } else {
            let len = rng.gen_range(5..=cfg.chain_len.max(5));
            random::derivation(&mut rng, len, &random::DEFAULT_VARS)
        };
        debug_assert!(hilbert::check(&d).accepted);
        report.derivations += 1;

        let mut formulas = d.hypotheses.clone();
        formulas.extend(d.lines.iter().map(|l| l.formula.clone()));
        for _ in 0..cfg.models_per_derivation {
            let space = random::finite_space(&mut rng, cfg.max_points);
            let model = random::model(&mut rng, space, &formulas).expect("random model evaluates");
            let vals = eval_all(&model, &formulas).expect("random model evaluates");
            report.models += 1;
            let full = model.space.full();
            let hyps = d.hypotheses.len();
            let meet = vals[..hyps].iter().fold(full.clone(), |acc, v| acc.intersection(v).expect("same carrier"));
            let failing = vals[hyps..].iter().position(|v| {
                let true_here = *v == full;
                let follows = hyps > 0 && meet.is_subset(v).expect("same carrier");
                !(true_here || follows)
            });
            report.line_checks += d.lines.len();
            if let Some(k) = failing {
                let mut minimized = d.clone();
                minimized.lines.truncate(k + 1);
                report.violations.push(SoundnessViolation { derivation: minimized, model });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_countermodel_for_explosion() {
        let target = f("p -> (!p -> q)");
        let r = refute_validity(&target, &SearchBudget::default()).unwrap().unwrap();
        assert_eq!(r.kind, ReportKind::RefutesValidity);
        assert!(r.replay().unwrap());
        assert_ne!(r.values[&target], r.model.space.full());
    }

    #[test]
    fn excluded_middle_has_no_countermodel() {
        assert!(refute_validity(&f("p | !p"), &SearchBudget::default()).unwrap().is_none());
        assert!(refute_validity(&f("p -> p"), &SearchBudget::default()).unwrap().is_none());
    }

    #[test]
    fn entailment_refutations() {
        let b = SearchBudget::default();
        let r = refute_entailment(&[f("p"), f("!p")], &f("q"), &b).unwrap().unwrap();
        assert!(r.replay().unwrap());
        assert!(r.validity_model.is_some());
        assert!(refute_entailment(&[f("@p"), f("!p")], &f("q"), &b).unwrap().is_some());
        assert!(refute_entailment(&[f("@p"), f("p"), f("!p")], &f("q"), &b).unwrap().is_none());
    }

    #[test]
    fn needs_a_larger_disjunction_value() {
        // false only when the two disjunctions get different values
        let target = f("((p & q) | r) -> ((q & p) | r)");
        let r = refute_validity(&target, &SearchBudget::default()).unwrap().unwrap();
        assert!(r.replay().unwrap());
        assert!(!r.model.valuation.disjunctions().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = SearchBudget { max_steps_per_space: 1, ..SearchBudget::default() };
        assert!(matches!(refute_validity(&f("p | !p"), &tiny), Err(SearchError::BudgetExceeded(_))));
        let bad = SearchBudget { max_points: 0, ..SearchBudget::default() };
        assert!(matches!(refute_validity(&f("p"), &bad), Err(SearchError::InvalidBudget(_))));
    }

    #[test]
    fn lfi_values() {
        let [i, ii, iii] = lfi_witnesses();
        assert_eq!(i.values[&f("p -> (!p -> q)")], real("(-inf,0) u (0,inf)"));
        assert_eq!(ii.values[&f("@p -> (p -> q)")], real("(-inf,0] u [1,inf)"));
        assert_eq!(iii.values[&f("@p -> (!p -> q)")], real("[0,1) u (2,3)"));
        for w in [i, ii, iii] {
            assert!(w.replay().unwrap());
        }
    }

    #[test]
    fn replacement_witness_verifies() {
        let w = replacement_failure_witness();
        assert!(w.verify().unwrap());
        assert_eq!(w.report.values[&w.left], PointSet::finite(2, 0b01));
        assert_eq!(w.report.values[&w.right], PointSet::finite(2, 0b01));
    }

    #[test]
    fn fuzz_is_deterministic() {
        let cfg = FuzzConfig { models_per_derivation: 10, ..FuzzConfig::new(3, 8) };
        let a = fuzz_soundness_with(&cfg);
        let b = fuzz_soundness_with(&cfg);
        assert_eq!(a, b);
        assert!(a.violations.is_empty());
    }
}
