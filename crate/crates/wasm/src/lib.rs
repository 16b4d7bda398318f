//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes strings and returns a JSON string; errors become
//! JavaScript exceptions carrying a message.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use vd_core::formula::{parse, Formula};
use vd_core::hilbert::{check, corpus, corpus_entry};
use vd_core::json as codec;
use vd_core::search::{refute_entailment, ReportKind, SearchBudget};
use vd_core::semantics::{eval_all, Model, Valuation};
use vd_core::topo::{IntervalSet, PointSet, Space};

fn formula(text: &str) -> Result<Formula, String> {
    parse(text).map_err(|e| format!("`{text}`: {e}"))
}

/// Values of every subformula of `target` on the real line, children first.
/// `vars` maps variable names to interval-set text such as `[0, 1) u {3}`.
pub fn evaluate_real_json(target: &str, vars: &str) -> Result<String, String> {
    let f = formula(target)?;
    let given: serde_json::Map<String, Value> = serde_json::from_str(vars).map_err(|e| e.to_string())?;
    let mut valuation = Valuation::new();
    for (name, text) in &given {
        let text = text.as_str().ok_or(format!("value of `{name}` must be a string"))?;
        let set: IntervalSet = text.parse().map_err(|e| format!("{name}: {e}"))?;
        valuation = valuation.with_var(name, PointSet::Real(set));
    }
    for name in f.variables() {
        if !valuation.vars.contains_key(&name) {
            return Err(format!("no value for variable `{name}`"));
        }
    }
    let model = Model::new(Space::Real, valuation).map_err(|e| e.to_string())?;
    let subs = f.subformulas();
    let vals = eval_all(&model, &subs).map_err(|e| e.to_string())?;
    let mut endpoints = Vec::new();
    let rows: Vec<Value> = subs
        .iter()
        .zip(&vals)
        .map(|(s, v)| {
            if let PointSet::Real(set) = v {
                endpoints.extend(set.endpoints().iter().map(|q| *q.numer() as f64 / *q.denom() as f64));
            }
            json!({"formula": s.to_string(), "text": v.to_string(), "intervals": codec::set_to_json(v)})
        })
        .collect();
    let lo = endpoints.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = endpoints.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({"rows": rows, "range": if lo.is_finite() { json!([lo, hi]) } else { Value::Null }}).to_string())
}

/// Checks `corpus:<name>` or a proof script in JSON.
pub fn check_proof_json(source: &str) -> Result<String, String> {
    let source = source.trim();
    let d = match source.strip_prefix("corpus:") {
        Some(name) => corpus_entry(name).ok_or(format!("no corpus entry `{name}`"))?.derivation,
        None => codec::proof_from_str(source).map_err(|e| e.to_string())?,
    };
    let report = check(&d);
    let mut out = codec::check_report_to_json(&report);
    out["proof"] = codec::proof_to_json(&d);
    Ok(out.to_string())
}

pub fn corpus_json() -> String {
    let entries: Vec<Value> = corpus()
        .into_iter()
        .map(|(name, e)| json!({"name": name, "description": e.description}))
        .collect();
    Value::from(entries).to_string()
}

/// Searches finite spaces of up to `max_points` points for a model where
/// the hypotheses (one per line) hold at a point where `target` fails.
pub fn find_countermodel_json(target: &str, hypotheses: &str, max_points: usize) -> Result<String, String> {
    let target = formula(target)?;
    let gamma = hypotheses
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(formula)
        .collect::<Result<Vec<_>, _>>()?;
    let budget = SearchBudget { max_points, max_steps_per_space: 500_000, ..SearchBudget::default() };
    let found = refute_entailment(&gamma, &target, &budget).map_err(|e| e.to_string())?;
    Ok(match found {
        None => json!({"found": false, "max_points": max_points}),
        Some(r) => {
            let mut report = codec::report_to_json(&r);
            report["found"] = true.into();
            report["summary"] = match r.kind {
                ReportKind::RefutesValidity => format!("{} is not valid", r.target),
                ReportKind::RefutesEntailment => {
                    let g: Vec<String> = r.gamma.iter().map(|g| g.to_string()).collect();
                    format!("{{{}}} does not entail {}", g.join(", "), r.target)
                }
            }
            .into();
            report
        }
    }
    .to_string())
}

#[wasm_bindgen]
pub fn evaluate_real(target: &str, vars: &str) -> Result<String, JsError> {
    evaluate_real_json(target, vars).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check_proof(source: &str) -> Result<String, JsError> {
    check_proof_json(source).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn corpus_names() -> String {
    corpus_json()
}

#[wasm_bindgen]
pub fn find_countermodel(target: &str, hypotheses: &str, max_points: usize) -> Result<String, JsError> {
    find_countermodel_json(target, hypotheses, max_points).map_err(|e| JsError::new(&e))
}
