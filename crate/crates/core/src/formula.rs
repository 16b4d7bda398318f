//! Object-language formulas over the connectives `&`, `|`, `->`, `!`, `@`, `~`.
//!
//! Surface syntax (ASCII):
//!
//! ```text
//! formula := imp
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := ("!" | "~" | "@")* atom
//! atom    := ident | "bot" "(" formula ")" | "(" formula ")"
//! ident   := [a-z][a-zA-Z0-9_]*
//! ```
//!
//! `!` is the paraconsistent negation, `@` the consistency operator and `~` the
//! classical negation. `bot(w)` is a macro for `w & (!w & @w)`; it never
//! survives parsing.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Var(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// Paraconsistent negation `!`.
    Neg(Box<Formula>),
    /// Consistency operator `@`.
    Circ(Box<Formula>),
    /// Classical negation `~`.
    ClassNeg(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        Formula::Neg(Box::new(a))
    }

    pub fn circ(a: Formula) -> Self {
        Formula::Circ(Box::new(a))
    }

    pub fn class_neg(a: Formula) -> Self {
        Formula::ClassNeg(Box::new(a))
    }

    /// The bottom particle `w & (!w & @w)` for the witness `w`.
    pub fn bot(witness: Formula) -> Self {
        Formula::and(
            witness.clone(),
            Formula::and(Formula::neg(witness.clone()), Formula::circ(witness)),
        )
    }

    /// If `self` has the shape `w & (!w & @w)`, returns `w`.
    pub fn as_bot(&self) -> Option<&Formula> {
        if let Formula::And(w, rest) = self {
            if let Formula::And(n, c) = rest.as_ref() {
                if let (Formula::Neg(w1), Formula::Circ(w2)) = (n.as_ref(), c.as_ref()) {
                    if w1 == w && w2 == w {
                        return Some(w);
                    }
                }
            }
        }
        None
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Neg(a) | Formula::Circ(a) | Formula::ClassNeg(a) => 1 + a.size(),
        }
    }

    pub fn contains_class_neg(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::ClassNeg(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_class_neg() || b.contains_class_neg()
            }
            Formula::Neg(a) | Formula::Circ(a) => a.contains_class_neg(),
        }
    }

    /// Variable names in sorted order.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Neg(a) | Formula::Circ(a) | Formula::ClassNeg(a) => a.collect_vars(out),
        }
    }

    /// All distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.push_subformulas(&mut seen, &mut out);
        out
    }

    fn push_subformulas<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
        if seen.contains(self) {
            return;
        }
        match self {
            Formula::Var(_) => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.push_subformulas(seen, out);
                b.push_subformulas(seen, out);
            }
            Formula::Neg(a) | Formula::Circ(a) | Formula::ClassNeg(a) => a.push_subformulas(seen, out),
        }
        seen.insert(self);
        out.push(self.clone());
    }

    /// Simultaneous substitution of formulas for variables.
    pub fn substitute(&self, binding: &MatchBinding) -> Formula {
        match self {
            Formula::Var(v) => binding.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::And(a, b) => Formula::and(a.substitute(binding), b.substitute(binding)),
            Formula::Or(a, b) => Formula::or(a.substitute(binding), b.substitute(binding)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(binding), b.substitute(binding)),
            Formula::Neg(a) => Formula::neg(a.substitute(binding)),
            Formula::Circ(a) => Formula::circ(a.substitute(binding)),
            Formula::ClassNeg(a) => Formula::class_neg(a.substitute(binding)),
        }
    }

    fn map_children(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Var(_) => self.clone(),
            Formula::And(a, b) => Formula::and(f(a), f(b)),
            Formula::Or(a, b) => Formula::or(f(a), f(b)),
            Formula::Imp(a, b) => Formula::imp(f(a), f(b)),
            Formula::Neg(a) => Formula::neg(f(a)),
            Formula::Circ(a) => Formula::circ(f(a)),
            Formula::ClassNeg(a) => Formula::class_neg(f(a)),
        }
    }
}

/// Replaces every `~g` by `g' -> bot(witness)`, bottom-up.
///
/// The result never contains a classical negation node. If the witness itself
/// contains `~h`, that occurrence is expanded with `h` as its own witness.
pub fn expand_defs(f: &Formula, witness: &Formula) -> Formula {
    let bot = Formula::bot(self_expand(witness));
    expand_with(f, &bot)
}

fn self_expand(f: &Formula) -> Formula {
    match f {
        Formula::ClassNeg(g) => {
            let g = self_expand(g);
            Formula::imp(g.clone(), Formula::bot(g))
        }
        _ => f.map_children(&mut self_expand),
    }
}

fn expand_with(f: &Formula, bot: &Formula) -> Formula {
    match f {
        Formula::ClassNeg(g) => Formula::imp(expand_with(g, bot), bot.clone()),
        _ => f.map_children(&mut |c| expand_with(c, bot)),
    }
}

/// Canonical representative modulo the abbreviation `~g := g -> bot(w)`.
///
/// Every subterm of the shape `g -> (w & (!w & @w))` (for any `w`) is folded
/// back into `~g`, bottom-up. Two formulas related by any number of
/// definitional rewrites, with any witnesses, have the same contraction.
pub fn contract_defs(f: &Formula) -> Formula {
    let f = f.map_children(&mut contract_defs);
    if let Formula::Imp(g, rhs) = &f {
        if rhs.as_bot().is_some() {
            return Formula::ClassNeg(g.clone());
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Printing

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Var(v) => out.write_str(v),
        Formula::Imp(a, b) => {
            write_at(a, PREC_IMP + 1, out)?;
            out.write_str(" -> ")?;
            write_at(b, PREC_IMP, out)
        }
        Formula::Or(a, b) => {
            write_at(a, PREC_OR, out)?;
            out.write_str(" | ")?;
            write_at(b, PREC_OR + 1, out)
        }
        Formula::And(a, b) => {
            write_at(a, PREC_AND, out)?;
            out.write_str(" & ")?;
            write_at(b, PREC_AND + 1, out)
        }
        Formula::Neg(a) => {
            out.write_str("!")?;
            write_at(a, PREC_UNARY, out)
        }
        Formula::Circ(a) => {
            out.write_str("@")?;
            write_at(a, PREC_UNARY, out)
        }
        Formula::ClassNeg(a) => {
            out.write_str("~")?;
            write_at(a, PREC_UNARY, out)
        }
    }
}

/// Prints with the minimal parentheses required by the precedence table.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.imp()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&["`->`", "`|`", "`&`", "end of input"]));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn error(&mut self, expected: &[&'static str]) -> ParseError {
        self.skip_ws();
        let found = match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                let tok: String = rest.chars().take(1).collect();
                format!("`{tok}`")
            }
        };
        ParseError { offset: self.pos, expected: expected.to_vec(), found }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::class_neg(self.unary()?))
            }
            Some(b'@') => {
                self.pos += 1;
                Ok(Formula::circ(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        const ATOM: &[&str] = &["identifier", "`bot(`", "`(`", "`!`", "`~`", "`@`"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.imp()?;
                if !self.eat(")") {
                    return Err(self.error(&["`)`"]));
                }
                Ok(f)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name == "bot" {
                    if !self.eat("(") {
                        return Err(self.error(&["`(` after `bot`"]));
                    }
                    let w = self.imp()?;
                    if !self.eat(")") {
                        return Err(self.error(&["`)`"]));
                    }
                    return Ok(Formula::bot(w));
                }
                Ok(Formula::Var(name.to_string()))
            }
            _ => Err(self.error(ATOM)),
        }
    }
}

// ---------------------------------------------------------------------------
// Axiom schemas

/// Metavariable names used in schema patterns.
pub const METAVARS: [&str; 3] = ["α", "β", "γ"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub id: u8,
    /// Pattern whose variables are metavariables.
    pub pattern: Formula,
}

/// Assignment of formulas to metavariables.
pub type MatchBinding = std::collections::BTreeMap<String, Formula>;

const SCHEMA_TEXT: [&str; 18] = [
    "a -> (b -> a)",
    "(a -> (b -> c)) -> ((a -> b) -> (a -> c))",
    "a -> (b -> (a & b))",
    "(a & b) -> a",
    "(a & b) -> b",
    "a -> (a | b)",
    "b -> (a | b)",
    "(a -> b) | a",
    "a | !a",
    "(a -> c) -> ((!a -> c) -> ((a | !a) -> c))",
    "((a -> b) -> c) -> ((a -> c) -> (((a -> b) | a) -> c))",
    "@a -> (a -> (!a -> b))",
    "@a | (a & !a)",
    "(@a -> c) -> (((a & !a) -> c) -> ((@a | (a & !a)) -> c))",
    "~!a -> ~!~!a",
    "~!~!a -> ~!a",
    "~!(a & b) -> (~!a & ~!b)",
    "(~!a & ~!b) -> ~!(a & b)",
];

/// The eighteen axiom schemas, indexed `1..=18`.
pub fn schemas() -> &'static [Schema] {
    static TABLE: std::sync::OnceLock<Vec<Schema>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let rename: MatchBinding = ["a", "b", "c"]
            .iter()
            .zip(METAVARS)
            .map(|(from, to)| (from.to_string(), Formula::var(to)))
            .collect();
        SCHEMA_TEXT
            .iter()
            .enumerate()
            .map(|(i, text)| Schema {
                id: i as u8 + 1,
                pattern: parse(text).expect("schema table parses").substitute(&rename),
            })
            .collect()
    })
}

pub fn schema(id: u8) -> Option<&'static Schema> {
    schemas().get(usize::from(id).checked_sub(1)?)
}

/// First-order matching of `f` against the schema pattern.
pub fn match_schema(f: &Formula, s: &Schema) -> Option<MatchBinding> {
    let mut binding = MatchBinding::new();
    match_into(&s.pattern, f, &mut binding).then_some(binding)
}

fn match_into(pattern: &Formula, f: &Formula, binding: &mut MatchBinding) -> bool {
    use Formula::*;
    match (pattern, f) {
        (Var(m), _) => match binding.get(m) {
            Some(bound) => bound == f,
            None => {
                binding.insert(m.clone(), f.clone());
                true
            }
        },
        (And(pa, pb), And(a, b)) | (Or(pa, pb), Or(a, b)) | (Imp(pa, pb), Imp(a, b)) => {
            match_into(pa, a, binding) && match_into(pb, b, binding)
        }
        (Neg(pa), Neg(a)) | (Circ(pa), Circ(a)) | (ClassNeg(pa), ClassNeg(a)) => match_into(pa, a, binding),
        _ => false,
    }
}

/// Instantiates schema `id` with the given formulas for α, β, γ.
pub fn instantiate(id: u8, args: &[Formula]) -> Option<Formula> {
    let s = schema(id)?;
    let binding: MatchBinding = METAVARS
        .iter()
        .zip(args)
        .map(|(m, f)| (m.to_string(), f.clone()))
        .collect();
    Some(s.pattern.substitute(&binding))
}
