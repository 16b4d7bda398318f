//! Derivations in the Hilbert system: checking, the deduction-theorem
//! transformation and a bundled corpus of worked derivations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{expand_defs, instantiate, match_schema, parse, schema, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Hyp,
    Axiom(u8),
    /// Modus ponens: line `j` must be `line i -> this`.
    Mp(usize, usize),
    /// From a theorem `a` infer `!a -> ~a`.
    Rule2(usize),
    /// Definitional rewrite of `~g` / `g -> bot(witness)` at any positions.
    Defn(usize, Formula),
}

impl Justification {
    fn refs(&self) -> Vec<usize> {
        match self {
            Justification::Hyp | Justification::Axiom(_) => vec![],
            Justification::Mp(i, j) => vec![*i, *j],
            Justification::Rule2(i) | Justification::Defn(i, _) => vec![*i],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub hypotheses: Vec<Formula>,
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn new(hypotheses: Vec<Formula>) -> Self {
        Derivation { hypotheses, lines: Vec::new() }
    }

    /// Appends a line and returns its index.
    pub fn push(&mut self, formula: Formula, just: Justification) -> usize {
        self.lines.push(Line { formula, just });
        self.lines.len() - 1
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("derivation has no lines")]
    Empty,
    #[error("formula is not among the hypotheses")]
    NotAHypothesis,
    #[error("formula is not an instance of axiom {0}")]
    SchemaMismatch(u8),
    #[error("modus ponens premises do not have the shapes `a` and `a -> b`")]
    MpShapeMismatch,
    #[error("rule 2 applied to a line that depends on a hypothesis")]
    Rule2OnNonTheorem,
    #[error("rule 2 conclusion must be `!a -> ~a` for the cited line `a`")]
    Rule2ShapeMismatch,
    #[error("formula is not a definitional rewrite of the cited line")]
    DefnMismatch,
    #[error("line reference {0} does not point to an earlier line")]
    BadLineRef(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub accepted: bool,
    /// `None` for a line that checks, otherwise the reason.
    pub status: Vec<Option<Rejection>>,
    /// Whether each line's justification ancestry is free of hypotheses.
    pub theorem_flags: Vec<bool>,
    pub first_error: Option<(usize, Rejection)>,
}

/// Checks every line of `d` independently of the others' status.
pub fn check(d: &Derivation) -> CheckReport {
    let n = d.lines.len();
    let mut status = Vec::with_capacity(n);
    let mut flags: Vec<bool> = Vec::with_capacity(n);

    for (idx, line) in d.lines.iter().enumerate() {
        let bad_ref = line.just.refs().into_iter().find(|&r| r >= idx);
        let flag = match (&line.just, bad_ref) {
            (_, Some(_)) => false,
            (Justification::Hyp, _) => false,
            (Justification::Axiom(_), _) => true,
            (Justification::Mp(i, j), _) => flags[*i] && flags[*j],
            (Justification::Rule2(i), _) | (Justification::Defn(i, _), _) => flags[*i],
        };
        flags.push(flag);

        let verdict = match bad_ref {
            Some(r) => Some(Rejection::BadLineRef(r)),
            None => check_line(d, idx, &flags),
        };
        status.push(verdict);
    }

    let first_error = if n == 0 {
        Some((0, Rejection::Empty))
    } else {
        status
            .iter()
            .enumerate()
            .find_map(|(i, s)| s.clone().map(|e| (i, e)))
    };
    CheckReport { accepted: first_error.is_none(), status, theorem_flags: flags, first_error }
}

fn check_line(d: &Derivation, idx: usize, flags: &[bool]) -> Option<Rejection> {
    let line = &d.lines[idx];
    let f = &line.formula;
    match &line.just {
        Justification::Hyp => (!d.hypotheses.contains(f)).then_some(Rejection::NotAHypothesis),
        Justification::Axiom(k) => match schema(*k) {
            Some(s) if match_schema(f, s).is_some() => None,
            _ => Some(Rejection::SchemaMismatch(*k)),
        },
        Justification::Mp(i, j) => {
            let expected = Formula::imp(d.lines[*i].formula.clone(), f.clone());
            (d.lines[*j].formula != expected).then_some(Rejection::MpShapeMismatch)
        }
        Justification::Rule2(i) => {
            let a = &d.lines[*i].formula;
            if !flags[*i] {
                Some(Rejection::Rule2OnNonTheorem)
            } else if *f != Formula::imp(Formula::neg(a.clone()), Formula::class_neg(a.clone())) {
                Some(Rejection::Rule2ShapeMismatch)
            } else {
                None
            }
        }
        Justification::Defn(i, w) => {
            let a = &d.lines[*i].formula;
            (expand_defs(a, w) != expand_defs(f, w)).then_some(Rejection::DefnMismatch)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("`{0}` is not a hypothesis of the derivation")]
    NotAHypothesis(Formula),
    #[error("input derivation does not check: line {line}: {reason}")]
    PreconditionViolated { line: usize, reason: Rejection },
}

/// Turns a derivation of `b` from `Γ ∪ {a}` into a derivation of `a -> b`
/// from `Γ` (every copy of `a` is discharged).
pub fn deduction_transform(d: &Derivation, a: &Formula) -> Result<Derivation, DeductionError> {
    let report = check(d);
    if let Some((line, reason)) = report.first_error {
        return Err(DeductionError::PreconditionViolated { line, reason });
    }
    if !d.hypotheses.contains(a) {
        return Err(DeductionError::NotAHypothesis(a.clone()));
    }

    let hypotheses: Vec<Formula> = d.hypotheses.iter().filter(|h| *h != a).cloned().collect();
    let mut out = Derivation::new(hypotheses);
    // verbatim copies of hypothesis-free lines
    let mut copy: Vec<Option<usize>> = vec![None; d.lines.len()];
    // index of the line proving `a -> φ_k`
    let mut arrow: Vec<usize> = Vec::with_capacity(d.lines.len());

    for (k, line) in d.lines.iter().enumerate() {
        let phi = &line.formula;
        let a_phi = Formula::imp(a.clone(), phi.clone());

        if report.theorem_flags[k] {
            let just = match &line.just {
                Justification::Axiom(id) => Justification::Axiom(*id),
                Justification::Mp(i, j) => Justification::Mp(copied(&copy, *i), copied(&copy, *j)),
                Justification::Rule2(i) => Justification::Rule2(copied(&copy, *i)),
                Justification::Defn(i, w) => Justification::Defn(copied(&copy, *i), w.clone()),
                Justification::Hyp => unreachable!("hypothesis lines are never theorem-flagged"),
            };
            let c = out.push(phi.clone(), just);
            copy[k] = Some(c);
            arrow.push(prefix_with_axiom1(&mut out, a, c));
            continue;
        }

        let idx = match &line.just {
            Justification::Hyp if phi == a => prove_identity(&mut out, a),
            Justification::Hyp => {
                let h = out.push(phi.clone(), Justification::Hyp);
                prefix_with_axiom1(&mut out, a, h)
            }
            Justification::Mp(i, j) => {
                let psi = &d.lines[*i].formula;
                // (a -> (ψ -> φ)) -> ((a -> ψ) -> (a -> φ))
                let ax2 = instantiate(2, &[a.clone(), psi.clone(), phi.clone()]).expect("axiom 2");
                let s = out.push(ax2, Justification::Axiom(2));
                let t = out.push(
                    Formula::imp(Formula::imp(a.clone(), psi.clone()), a_phi.clone()),
                    Justification::Mp(arrow[*j], s),
                );
                out.push(a_phi, Justification::Mp(arrow[*i], t))
            }
            Justification::Defn(i, w) => out.push(a_phi, Justification::Defn(arrow[*i], w.clone())),
            Justification::Axiom(_) | Justification::Rule2(_) => {
                unreachable!("axiom and rule 2 lines are always theorem-flagged")
            }
        };
        arrow.push(idx);
    }
    Ok(out)
}

fn copied(copy: &[Option<usize>], i: usize) -> usize {
    copy[i].expect("ancestors of a theorem-flagged line are theorem-flagged")
}

/// Emits `φ -> (a -> φ)` and `a -> φ` for an existing line `φ`.
fn prefix_with_axiom1(out: &mut Derivation, a: &Formula, line: usize) -> usize {
    let phi = out.lines[line].formula.clone();
    let ax1 = instantiate(1, &[phi.clone(), a.clone()]).expect("axiom 1");
    let k = out.push(ax1, Justification::Axiom(1));
    out.push(Formula::imp(a.clone(), phi), Justification::Mp(line, k))
}

/// The five-line proof of `a -> a`.
fn prove_identity(out: &mut Derivation, a: &Formula) -> usize {
    let aa = Formula::imp(a.clone(), a.clone());
    let l1 = out.push(instantiate(1, &[a.clone(), aa.clone()]).expect("axiom 1"), Justification::Axiom(1));
    let l2 = out.push(instantiate(2, &[a.clone(), aa.clone(), a.clone()]).expect("axiom 2"), Justification::Axiom(2));
    let l3 = out.push(Formula::imp(Formula::imp(a.clone(), aa.clone()), aa.clone()), Justification::Mp(l1, l2));
    let l4 = out.push(instantiate(1, &[a.clone(), a.clone()]).expect("axiom 1"), Justification::Axiom(1));
    out.push(aa, Justification::Mp(l4, l3))
}

// ---------------------------------------------------------------------------
// Corpus

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub description: &'static str,
    pub derivation: Derivation,
    /// `Some(reason)` for entries that must be rejected.
    pub expect_reject: Option<Rejection>,
}

struct Script(Derivation);

impl Script {
    fn new(hyps: &[&str]) -> Self {
        Script(Derivation::new(hyps.iter().map(|h| f(h)).collect()))
    }

    fn line(mut self, formula: &str, just: Justification) -> Self {
        self.0.push(f(formula), just);
        self
    }

    fn hyp(self, formula: &str) -> Self {
        self.line(formula, Justification::Hyp)
    }

    fn ax(self, id: u8, formula: &str) -> Self {
        self.line(formula, Justification::Axiom(id))
    }

    fn mp(self, i: usize, j: usize, formula: &str) -> Self {
        self.line(formula, Justification::Mp(i, j))
    }

    fn defn(self, i: usize, witness: &str, formula: &str) -> Self {
        self.line(formula, Justification::Defn(i, f(witness)))
    }
}

fn f(text: &str) -> Formula {
    parse(text).expect("corpus formula parses")
}

/// Bundled derivations, addressable by name.
pub fn corpus() -> BTreeMap<&'static str, CorpusEntry> {
    let mut out = BTreeMap::new();

    let explosion = Script::new(&["p", "~p"])
        .hyp("p")
        .hyp("~p")
        .defn(1, "p", "p -> bot(p)")
        .mp(0, 2, "bot(p)")
        .defn(3, "p", "p & (!p & @p)")
        .ax(5, "(p & (!p & @p)) -> (!p & @p)")
        .mp(4, 5, "!p & @p")
        .ax(4, "(!p & @p) -> !p")
        .mp(6, 7, "!p")
        .ax(5, "(!p & @p) -> @p")
        .mp(6, 9, "@p")
        .ax(12, "@p -> (p -> (!p -> q))")
        .mp(10, 11, "p -> (!p -> q)")
        .mp(0, 12, "!p -> q")
        .mp(8, 13, "q");
    out.insert(
        "thm2.7.i",
        CorpusEntry {
            description: "classical negation explodes: {p, ~p} derives q",
            derivation: explosion.0,
            expect_reject: None,
        },
    );

    let lem = Script::new(&[])
        .ax(8, "(p -> bot(p)) | p")
        .defn(0, "p", "~p | p");
    out.insert(
        "thm2.7.ii",
        CorpusEntry {
            description: "excluded middle for classical negation: ~p | p",
            derivation: lem.0,
            expect_reject: None,
        },
    );

    let unrestricted = Script::new(&["p", "!p"])
        .hyp("p")
        .line("!p -> ~p", Justification::Rule2(0))
        .hyp("!p")
        .mp(2, 1, "~p")
        .defn(3, "q", "p -> bot(q)")
        .mp(0, 4, "bot(q)")
        .defn(5, "q", "q & (!q & @q)")
        .ax(4, "(q & (!q & @q)) -> q")
        .mp(6, 7, "q");
    out.insert(
        "remark2.4",
        CorpusEntry {
            description: "rule 2 applied to a hypothesis would make {p, !p} explode",
            derivation: unrestricted.0,
            expect_reject: Some(Rejection::Rule2OnNonTheorem),
        },
    );

    let and_comm = |from: &str, to: &str, l: &str, r: &str| {
        Script::new(&[from])
            .hyp(from)
            .ax(5, &format!("({from}) -> {r}"))
            .mp(0, 1, r)
            .ax(4, &format!("({from}) -> {l}"))
            .mp(0, 3, l)
            .ax(3, &format!("{r} -> ({l} -> ({to}))"))
            .mp(2, 5, &format!("{l} -> ({to})"))
            .mp(4, 6, to)
            .0
    };
    out.insert(
        "and-comm-lr",
        CorpusEntry {
            description: "q & p from p & q",
            derivation: and_comm("p & q", "q & p", "p", "q"),
            expect_reject: None,
        },
    );
    out.insert(
        "and-comm-rl",
        CorpusEntry {
            description: "p & q from q & p",
            derivation: and_comm("q & p", "p & q", "q", "p"),
            expect_reject: None,
        },
    );

    let gentle = Script::new(&["@p", "p", "!p"])
        .hyp("@p")
        .hyp("p")
        .hyp("!p")
        .ax(12, "@p -> (p -> (!p -> q))")
        .mp(0, 3, "p -> (!p -> q)")
        .mp(1, 4, "!p -> q")
        .mp(2, 5, "q");
    out.insert(
        "gentle-explosion",
        CorpusEntry {
            description: "{@p, p, !p} derives q",
            derivation: gentle.0,
            expect_reject: None,
        },
    );

    let rule2 = Script::new(&[])
        .ax(9, "p | !p")
        .line("!(p | !p) -> ~(p | !p)", Justification::Rule2(0));
    out.insert(
        "rule2-on-theorem",
        CorpusEntry {
            description: "rule 2 on the theorem p | !p",
            derivation: rule2.0,
            expect_reject: None,
        },
    );

    out
}

pub fn corpus_entry(name: &str) -> Option<CorpusEntry> {
    corpus().remove(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(formula: &str, just: Justification, hyps: &[&str]) -> Derivation {
        Script::new(hyps).line(formula, just).0
    }

    #[test]
    fn axiom_line_is_theorem() {
        let d = single("p -> (q -> p)", Justification::Axiom(1), &[]);
        let r = check(&d);
        assert!(r.accepted);
        assert_eq!(r.theorem_flags, vec![true]);
    }

    #[test]
    fn rejection_reasons() {
        let r = check(&single("p", Justification::Hyp, &["q"]));
        assert_eq!(r.first_error, Some((0, Rejection::NotAHypothesis)));

        let r = check(&single("p -> (q -> r)", Justification::Axiom(1), &[]));
        assert_eq!(r.first_error, Some((0, Rejection::SchemaMismatch(1))));

        let r = check(&single("p", Justification::Axiom(42), &[]));
        assert_eq!(r.first_error, Some((0, Rejection::SchemaMismatch(42))));

        let r = check(&single("p", Justification::Mp(0, 0), &[]));
        assert_eq!(r.first_error, Some((0, Rejection::BadLineRef(0))));

        let d = Script::new(&["p", "q -> r"]).hyp("p").hyp("q -> r").mp(0, 1, "r").0;
        assert_eq!(check(&d).first_error, Some((2, Rejection::MpShapeMismatch)));

        let d = Script::new(&[]).ax(9, "p | !p").line("!p -> ~p", Justification::Rule2(0)).0;
        assert_eq!(check(&d).first_error, Some((1, Rejection::Rule2ShapeMismatch)));

        let d = Script::new(&["~p"]).hyp("~p").defn(0, "q", "p -> bot(r)").0;
        assert_eq!(check(&d).first_error, Some((1, Rejection::DefnMismatch)));

        assert_eq!(check(&Derivation::default()).first_error, Some((0, Rejection::Empty)));
    }

    #[test]
    fn defn_rewrites_in_both_directions() {
        let d = Script::new(&["p -> bot(q)"])
            .hyp("p -> bot(q)")
            .defn(0, "q", "~p")
            .defn(1, "q", "p -> bot(q)")
            .0;
        assert!(check(&d).accepted);
    }

    #[test]
    fn corpus_verdicts() {
        for (name, entry) in corpus() {
            let r = check(&entry.derivation);
            match &entry.expect_reject {
                None => assert!(r.accepted, "{name}: {:?}", r.first_error),
                Some(reason) => assert_eq!(r.first_error.as_ref().map(|e| &e.1), Some(reason), "{name}"),
            }
        }
        let remark = corpus_entry("remark2.4").unwrap();
        assert_eq!(check(&remark.derivation).first_error, Some((1, Rejection::Rule2OnNonTheorem)));
        let lem = corpus_entry("thm2.7.ii").unwrap().derivation;
        assert!(lem.hypotheses.is_empty());
        assert_eq!(lem.conclusion(), Some(&f("~p | p")));
        assert_eq!(corpus_entry("thm2.7.i").unwrap().derivation.lines.len(), 15);
    }

    #[test]
    fn identity_from_single_hypothesis() {
        let d = single("p", Justification::Hyp, &["p"]);
        let out = deduction_transform(&d, &f("p")).unwrap();
        assert_eq!(out.lines.len(), 5);
        assert!(out.hypotheses.is_empty());
        assert!(check(&out).accepted);
        assert_eq!(out.conclusion(), Some(&f("p -> p")));
        let axioms = out.lines.iter().filter(|l| l.just == Justification::Axiom(1)).count();
        assert_eq!(axioms, 2);
    }

    #[test]
    fn explosion_discharges_twice() {
        let d = corpus_entry("thm2.7.i").unwrap().derivation;
        let once = deduction_transform(&d, &f("~p")).unwrap();
        assert!(check(&once).accepted);
        assert_eq!(once.hypotheses, vec![f("p")]);
        assert_eq!(once.conclusion(), Some(&f("~p -> q")));
        let twice = deduction_transform(&once, &f("p")).unwrap();
        assert!(check(&twice).accepted);
        assert!(twice.hypotheses.is_empty());
        assert_eq!(twice.conclusion(), Some(&f("p -> (~p -> q)")));
    }

    #[test]
    fn theorem_lines_are_prefixed() {
        let d = single("p | !p", Justification::Axiom(9), &["q"]);
        let out = deduction_transform(&d, &f("q")).unwrap();
        assert!(check(&out).accepted);
        assert!(out.hypotheses.is_empty());
        assert_eq!(out.conclusion(), Some(&f("q -> (p | !p)")));
    }

    #[test]
    fn deduction_errors() {
        let d = single("p", Justification::Hyp, &["p"]);
        assert!(matches!(deduction_transform(&d, &f("q")), Err(DeductionError::NotAHypothesis(_))));
        let bad = corpus_entry("remark2.4").unwrap().derivation;
        assert!(matches!(
            deduction_transform(&bad, &f("p")),
            Err(DeductionError::PreconditionViolated { line: 1, .. })
        ));
    }
}
