//! JSON encodings of spaces, point sets, models, proofs and reports.
//!
//! Decoders validate as they go and report the first problem with a JSON
//! pointer into the input document.

use std::collections::BTreeMap;
use std::time::Duration;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::formula::{parse, Formula};
use crate::hilbert::{CheckReport, Derivation, Justification, Line};
use crate::search::{CounterexampleReport, FuzzReport, ReportKind, SearchBudget};
use crate::semantics::{EvalError, Model, Valuation};
use crate::topo::finite::{from_members, members};
use crate::topo::interval::{fmt_rational, parse_bound};
use crate::topo::{Bound, FiniteSpace, Interval, IntervalSet, KuratowskiLike, PointSet, Space, TopoError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("{pointer}: {reason}")]
    Schema { pointer: String, reason: String },
    #[error("{0}")]
    Invariant(String),
}

fn schema<T>(pointer: &str, reason: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Schema { pointer: pointer.to_string(), reason: reason.into() })
}

fn child(pointer: &str, token: impl ToString) -> String {
    let token = token.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{token}")
}

fn from_text(text: &str) -> Result<Value, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))
}

fn field<'v>(v: &'v Value, pointer: &str, key: &str) -> Result<&'v Value, JsonError> {
    match v.as_object() {
        Some(o) => match o.get(key) {
            Some(x) => Ok(x),
            None => schema(&child(pointer, key), "missing field"),
        },
        None => schema(pointer, "expected an object"),
    }
}

fn array<'v>(v: &'v Value, pointer: &str) -> Result<&'v Vec<Value>, JsonError> {
    v.as_array().map_or_else(|| schema(pointer, "expected an array"), Ok)
}

fn string<'v>(v: &'v Value, pointer: &str) -> Result<&'v str, JsonError> {
    v.as_str().map_or_else(|| schema(pointer, "expected a string"), Ok)
}

fn boolean(v: &Value, pointer: &str) -> Result<bool, JsonError> {
    v.as_bool().map_or_else(|| schema(pointer, "expected a boolean"), Ok)
}

fn index(v: &Value, pointer: &str) -> Result<usize, JsonError> {
    match v.as_u64() {
        Some(i) => Ok(i as usize),
        None => schema(pointer, "expected a non-negative integer"),
    }
}

fn formula(v: &Value, pointer: &str) -> Result<Formula, JsonError> {
    let text = string(v, pointer)?;
    parse(text).or_else(|e| schema(pointer, e.to_string()))
}

// ---------------------------------------------------------------------------
// Sets and spaces

pub fn finite_set_to_json(bits: u64) -> Value {
    Value::from(members(bits).collect::<Vec<_>>())
}

pub fn finite_set_from_json(v: &Value, n: usize, pointer: &str) -> Result<u64, JsonError> {
    let mut points = Vec::new();
    for (k, p) in array(v, pointer)?.iter().enumerate() {
        let ptr = child(pointer, k);
        let p = index(p, &ptr)?;
        if p >= n {
            return schema(&ptr, format!("point {p} is outside a carrier of {n} points"));
        }
        points.push(p);
    }
    Ok(from_members(points))
}

fn bound_to_json(b: Bound) -> Value {
    match b {
        Bound::NegInf => "-inf".into(),
        Bound::PosInf => "inf".into(),
        Bound::Finite(q) => fmt_rational(q).into(),
    }
}

pub fn interval_to_json(i: &Interval) -> Value {
    json!({
        "lo": bound_to_json(i.lo()),
        "hi": bound_to_json(i.hi()),
        "lo_open": i.lo_open(),
        "hi_open": i.hi_open(),
    })
}

pub fn interval_from_json(v: &Value, pointer: &str) -> Result<Interval, JsonError> {
    let bound = |key: &str| -> Result<Bound, JsonError> {
        let ptr = child(pointer, key);
        let text = string(field(v, pointer, key)?, &ptr)?;
        parse_bound(text).or_else(|e| schema(&ptr, e.to_string()))
    };
    let lo = bound("lo")?;
    let hi = bound("hi")?;
    let lo_open = boolean(field(v, pointer, "lo_open")?, &child(pointer, "lo_open"))?;
    let hi_open = boolean(field(v, pointer, "hi_open")?, &child(pointer, "hi_open"))?;
    Interval::new(lo, lo_open, hi, hi_open).or_else(|e| schema(pointer, e.to_string()))
}

/// An interval set is an array of intervals, in canonical order on output.
pub fn interval_set_to_json(s: &IntervalSet) -> Value {
    Value::from(s.intervals().iter().map(interval_to_json).collect::<Vec<_>>())
}

pub fn interval_set_from_json(v: &Value, pointer: &str) -> Result<IntervalSet, JsonError> {
    let parts = array(v, pointer)?
        .iter()
        .enumerate()
        .map(|(k, x)| interval_from_json(x, &child(pointer, k)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntervalSet::from_intervals(parts))
}

pub fn set_to_json(s: &PointSet) -> Value {
    match s {
        PointSet::Finite { bits, .. } => finite_set_to_json(*bits),
        PointSet::Real(s) => interval_set_to_json(s),
    }
}

pub fn set_from_json(v: &Value, space: &Space, pointer: &str) -> Result<PointSet, JsonError> {
    match space {
        Space::Finite(t) => Ok(PointSet::finite(t.n(), finite_set_from_json(v, t.n(), pointer)?)),
        Space::Real => Ok(PointSet::Real(interval_set_from_json(v, pointer)?)),
    }
}

pub fn finite_space_to_json(t: &FiniteSpace) -> Value {
    json!({
        "n": t.n(),
        "opens": t.opens().iter().map(|&o| finite_set_to_json(o)).collect::<Vec<_>>(),
    })
}

pub fn finite_space_from_json(v: &Value, pointer: &str) -> Result<FiniteSpace, JsonError> {
    let n_ptr = child(pointer, "n");
    let n = index(field(v, pointer, "n")?, &n_ptr)?;
    if n > crate::topo::finite::MAX_POINTS {
        return schema(&n_ptr, format!("at most {} points are supported", crate::topo::finite::MAX_POINTS));
    }
    let opens_ptr = child(pointer, "opens");
    let opens = array(field(v, pointer, "opens")?, &opens_ptr)?
        .iter()
        .enumerate()
        .map(|(k, o)| finite_set_from_json(o, n, &child(&opens_ptr, k)))
        .collect::<Result<Vec<_>, _>>()?;
    FiniteSpace::new(n, opens).or_else(|e| schema(&opens_ptr, topo_reason(&e)))
}

fn topo_reason(e: &TopoError) -> String {
    match e {
        TopoError::MissingCarrier => "the opens must contain the whole carrier X".into(),
        TopoError::MissingEmpty => "the opens must contain the empty set".into(),
        other => other.to_string(),
    }
}

pub fn space_to_json(s: &Space) -> Value {
    match s {
        Space::Real => json!({"kind": "real"}),
        Space::Finite(t) => {
            let mut v = finite_space_to_json(t);
            v["kind"] = "finite".into();
            v
        }
    }
}

pub fn space_from_json(v: &Value, pointer: &str) -> Result<Space, JsonError> {
    let kind_ptr = child(pointer, "kind");
    match string(field(v, pointer, "kind")?, &kind_ptr)? {
        "real" => Ok(Space::Real),
        "finite" => Ok(Space::Finite(finite_space_from_json(v, pointer)?)),
        other => schema(&kind_ptr, format!("unknown space kind `{other}`")),
    }
}

// ---------------------------------------------------------------------------
// Models

pub fn model_to_json(m: &Model) -> Value {
    let vars: Map<String, Value> = m.valuation.vars.iter().map(|(k, v)| (k.clone(), set_to_json(v))).collect();
    let disjunctions: Vec<Value> = m
        .valuation
        .disjunctions()
        .iter()
        .map(|(f, v)| json!({"formula": f.to_string(), "value": set_to_json(v)}))
        .collect();
    json!({
        "space": space_to_json(&m.space),
        "vars": vars,
        "disjunctions": disjunctions,
    })
}

/// Decodes a model and checks every disjunction entry against its operands.
pub fn model_from_json(v: &Value) -> Result<Model, JsonError> {
    model_at(v, "")
}

pub fn model_from_str(text: &str) -> Result<Model, JsonError> {
    model_from_json(&from_text(text)?)
}

fn model_at(v: &Value, pointer: &str) -> Result<Model, JsonError> {
    let space = space_from_json(field(v, pointer, "space")?, &child(pointer, "space"))?;
    let mut valuation = Valuation::new();

    let vars_ptr = child(pointer, "vars");
    let vars = field(v, pointer, "vars")?;
    let Some(vars) = vars.as_object() else {
        return schema(&vars_ptr, "expected an object");
    };
    for (name, set) in vars {
        let ptr = child(&vars_ptr, name);
        match parse(name) {
            Ok(Formula::Var(_)) => {}
            _ => return schema(&ptr, format!("`{name}` is not a variable name")),
        }
        valuation.vars.insert(name.clone(), set_from_json(set, &space, &ptr)?);
    }

    let disj_ptr = child(pointer, "disjunctions");
    let entries = match v.get("disjunctions") {
        Some(d) => array(d, &disj_ptr)?.as_slice(),
        None => &[],
    };
    for (k, entry) in entries.iter().enumerate() {
        let ptr = child(&disj_ptr, k);
        let f_ptr = child(&ptr, "formula");
        let f = formula(field(entry, &ptr, "formula")?, &f_ptr)?;
        let value = set_from_json(field(entry, &ptr, "value")?, &space, &child(&ptr, "value"))?;
        if valuation.disjunction(&f).is_some() {
            return schema(&f_ptr, format!("duplicate entry for `{f}`"));
        }
        if valuation.set_disjunction(&f, value).is_err() {
            return schema(&f_ptr, format!("`{f}` is not a disjunction"));
        }
    }

    let model = Model::new(space, valuation).map_err(|e| JsonError::Invariant(e.to_string()))?;
    model.check_disjunctions().map_err(|e| match e {
        EvalError::OracleConstraintViolated(f) => JsonError::Invariant(format!(
            "disjunction `{f}` is assigned a value that does not contain the union of its operands"
        )),
        other => JsonError::Invariant(other.to_string()),
    })?;
    Ok(model)
}

// ---------------------------------------------------------------------------
// Proofs

fn just_to_json(j: &Justification) -> Value {
    match j {
        Justification::Hyp => json!({"kind": "hyp"}),
        Justification::Axiom(id) => json!({"kind": "axiom", "id": id}),
        Justification::Mp(i, j) => json!({"kind": "mp", "i": i, "j": j}),
        Justification::Rule2(i) => json!({"kind": "rule2", "i": i}),
        Justification::Defn(i, w) => json!({"kind": "defn", "i": i, "witness": w.to_string()}),
    }
}

pub fn proof_to_json(d: &Derivation) -> Value {
    json!({
        "hypotheses": d.hypotheses.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
        "lines": d.lines.iter().map(|l| json!({"formula": l.formula.to_string(), "just": just_to_json(&l.just)})).collect::<Vec<_>>(),
    })
}

/// Decodes a proof script. Line references must point to earlier lines;
/// whether the lines are correct is left to the checker.
pub fn proof_from_json(v: &Value) -> Result<Derivation, JsonError> {
    let hyp_ptr = "/hypotheses";
    let hypotheses = match v.get("hypotheses") {
        Some(h) => array(h, hyp_ptr)?
            .iter()
            .enumerate()
            .map(|(k, f)| formula(f, &child(hyp_ptr, k)))
            .collect::<Result<Vec<_>, _>>()?,
        None if v.is_object() => Vec::new(),
        None => return schema("", "expected an object"),
    };
    let mut d = Derivation::new(hypotheses);
    for (k, line) in array(field(v, "", "lines")?, "/lines")?.iter().enumerate() {
        let ptr = child("/lines", k);
        let f = formula(field(line, &ptr, "formula")?, &child(&ptr, "formula"))?;
        let just_ptr = child(&ptr, "just");
        let just = just_from_json(field(line, &ptr, "just")?, &just_ptr, k)?;
        d.lines.push(Line { formula: f, just });
    }
    Ok(d)
}

pub fn proof_from_str(text: &str) -> Result<Derivation, JsonError> {
    proof_from_json(&from_text(text)?)
}

fn just_from_json(v: &Value, pointer: &str, line: usize) -> Result<Justification, JsonError> {
    let line_ref = |key: &str| -> Result<usize, JsonError> {
        let ptr = child(pointer, key);
        let i = index(field(v, pointer, key)?, &ptr)?;
        if i >= line {
            return schema(&ptr, format!("line {line} refers to line {i}, which is not an earlier line"));
        }
        Ok(i)
    };
    let kind_ptr = child(pointer, "kind");
    Ok(match string(field(v, pointer, "kind")?, &kind_ptr)? {
        "hyp" => Justification::Hyp,
        "axiom" => {
            let ptr = child(pointer, "id");
            let id = index(field(v, pointer, "id")?, &ptr)?;
            if !(1..=18).contains(&id) {
                return schema(&ptr, format!("no axiom schema {id}"));
            }
            Justification::Axiom(id as u8)
        }
        "mp" => Justification::Mp(line_ref("i")?, line_ref("j")?),
        "rule2" => Justification::Rule2(line_ref("i")?),
        "defn" => {
            let i = line_ref("i")?;
            Justification::Defn(i, formula(field(v, pointer, "witness")?, &child(pointer, "witness"))?)
        }
        other => return schema(&kind_ptr, format!("unknown justification `{other}`")),
    })
}

pub fn check_report_to_json(r: &CheckReport) -> Value {
    let lines: Vec<Value> = r
        .status
        .iter()
        .zip(&r.theorem_flags)
        .map(|(s, flag)| {
            json!({
                "ok": s.is_none(),
                "theorem": flag,
                "error": s.as_ref().map(|e| format!("{e:?}")),
            })
        })
        .collect();
    json!({
        "accepted": r.accepted,
        "lines": lines,
        "first_error": r.first_error.as_ref().map(|(i, e)| json!({"line": i, "rejection": format!("{e:?}"), "message": e.to_string()})),
    })
}

// ---------------------------------------------------------------------------
// Reports

pub fn budget_to_json(b: &SearchBudget) -> Value {
    json!({
        "max_points": b.max_points,
        "max_oracle_candidates": b.max_oracle_candidates,
        "max_steps_per_space": b.max_steps_per_space,
        "time_limit_ms": b.time_limit.map(|t| t.as_millis() as u64),
    })
}

pub fn budget_from_json(v: &Value, pointer: &str) -> Result<SearchBudget, JsonError> {
    let num = |key: &str| index(field(v, pointer, key)?, &child(pointer, key));
    let time_limit = match v.get("time_limit_ms") {
        None | Some(Value::Null) => None,
        Some(t) => Some(Duration::from_millis(index(t, &child(pointer, "time_limit_ms"))? as u64)),
    };
    Ok(SearchBudget {
        max_points: num("max_points")?,
        max_oracle_candidates: num("max_oracle_candidates")?,
        max_steps_per_space: num("max_steps_per_space")? as u64,
        time_limit,
    })
}

pub fn report_to_json(r: &CounterexampleReport) -> Value {
    let mut v = model_to_json(&r.model);
    let values: Map<String, Value> = r.values.iter().map(|(f, s)| (f.to_string(), set_to_json(s))).collect();
    v["kind"] = match r.kind {
        ReportKind::RefutesValidity => "refutes_validity",
        ReportKind::RefutesEntailment => "refutes_entailment",
    }
    .into();
    v["gamma"] = r.gamma.iter().map(|g| g.to_string()).collect::<Vec<_>>().into();
    v["target"] = r.target.to_string().into();
    v["values"] = values.into();
    v["budget"] = r.budget.as_ref().map_or(Value::Null, budget_to_json);
    if let Some(m) = &r.validity_model {
        if *m != r.model {
            v["validity_model"] = model_to_json(m);
        }
    }
    v
}

pub fn report_from_json(v: &Value) -> Result<CounterexampleReport, JsonError> {
    let model = model_from_json(v)?;
    let kind = match string(field(v, "", "kind")?, "/kind")? {
        "refutes_validity" => ReportKind::RefutesValidity,
        "refutes_entailment" => ReportKind::RefutesEntailment,
        other => return schema("/kind", format!("unknown report kind `{other}`")),
    };
    let gamma = array(field(v, "", "gamma")?, "/gamma")?
        .iter()
        .enumerate()
        .map(|(k, g)| formula(g, &child("/gamma", k)))
        .collect::<Result<Vec<_>, _>>()?;
    let target = formula(field(v, "", "target")?, "/target")?;
    let Some(raw) = field(v, "", "values")?.as_object() else {
        return schema("/values", "expected an object");
    };
    let mut values = BTreeMap::new();
    for (text, set) in raw {
        let ptr = child("/values", text);
        let f = parse(text).or_else(|e| schema(&ptr, e.to_string()))?;
        values.insert(f, set_from_json(set, &model.space, &ptr)?);
    }
    let budget = match v.get("budget") {
        None | Some(Value::Null) => None,
        Some(b) => Some(budget_from_json(b, "/budget")?),
    };
    let validity_model = match (kind, v.get("validity_model")) {
        (ReportKind::RefutesValidity, _) => None,
        (_, Some(m)) => Some(model_at(m, "/validity_model")?),
        (_, None) => Some(model.clone()),
    };
    Ok(CounterexampleReport { kind, gamma, target, model, validity_model, values, budget })
}

pub fn fuzz_report_to_json(r: &FuzzReport) -> Value {
    json!({
        "seed": r.seed,
        "iterations": r.iterations,
        "derivations": r.derivations,
        "models": r.models,
        "line_checks": r.line_checks,
        "violations": r.violations.iter().map(|v| json!({
            "proof": proof_to_json(&v.derivation),
            "model": model_to_json(&v.model),
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// Kuratowski-like operators

/// `{"n": 2, "hat": [{"set": [0], "image": [0, 1]}, ...]}`; the family is the
/// set of `set` entries.
pub fn kuratowski_like_to_json(k: &KuratowskiLike) -> Value {
    json!({
        "n": k.n,
        "hat": k.hat.iter().map(|(&s, &i)| json!({"set": finite_set_to_json(s), "image": finite_set_to_json(i)})).collect::<Vec<_>>(),
    })
}

pub fn kuratowski_like_from_json(v: &Value) -> Result<KuratowskiLike, JsonError> {
    let n = index(field(v, "", "n")?, "/n")?;
    if n > crate::topo::kuratowski::MAX_CLOSURE_POINTS {
        return schema("/n", format!("at most {} points are supported", crate::topo::kuratowski::MAX_CLOSURE_POINTS));
    }
    let mut hat = BTreeMap::new();
    for (k, entry) in array(field(v, "", "hat")?, "/hat")?.iter().enumerate() {
        let ptr = child("/hat", k);
        let set_ptr = child(&ptr, "set");
        let set = finite_set_from_json(field(entry, &ptr, "set")?, n, &set_ptr)?;
        let image = finite_set_from_json(field(entry, &ptr, "image")?, n, &child(&ptr, "image"))?;
        if hat.insert(set, image).is_some() {
            return schema(&set_ptr, "set listed twice");
        }
    }
    Ok(KuratowskiLike { n, hat })
}

pub fn kuratowski_like_from_str(text: &str) -> Result<KuratowskiLike, JsonError> {
    kuratowski_like_from_json(&from_text(text)?)
}
