//! The `vd` command line.
//!
//! Exit codes: 0 for success or a positive verdict, 1 for a negative verdict
//! (rejected proof, failed entailment, countermodel against an asserted
//! entailment), 2 for usage and input errors, 3 when a search budget runs out.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use vd_core::formula::{parse, Formula};
use vd_core::hilbert::{check, corpus, corpus_entry, Derivation};
use vd_core::json::{self as codec, JsonError};
use vd_core::search::{
    fuzz_soundness_with, lfi_witnesses, refute_entailment, replacement_failure_witness, CounterexampleReport,
    FuzzConfig, ReportKind, SearchBudget, SearchError,
};
use vd_core::semantics::{consequence_in_model, eval_all, meet, Model};
use vd_core::topo::finite::{members, DEFAULT_ENUM_CAP};
use vd_core::topo::{enumerate_topologies, extend_kuratowski, FiniteSpace, KuratowskiLike, Space};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vd", version, about = "Proof checking, semantics and countermodel search for the logic vD")]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print it in canonical form.
    Parse { formula: String },
    /// Check a proof script, given as a JSON file or `corpus:<name>`.
    CheckProof {
        #[arg(required_unless_present = "list")]
        proof: Option<String>,
        /// List the bundled corpus instead.
        #[arg(long, conflicts_with = "proof")]
        list: bool,
    },
    /// Evaluate formulas in a model file.
    Eval {
        model: PathBuf,
        #[arg(required = true)]
        formulas: Vec<String>,
    },
    /// Decide whether the hypotheses entail the target in one model.
    Entails {
        model: PathBuf,
        target: String,
        /// A hypothesis; repeat for several.
        #[arg(long = "hyp")]
        hyps: Vec<String>,
    },
    /// Assert that the hypotheses entail the target and search for a
    /// finite countermodel; exits 1 if one is found.
    Refute(SearchArgs),
    /// Search for a finite countermodel; exits 0 if one is found and 1 if
    /// none exists within the budget.
    FindCountermodel(SearchArgs),
    /// Real-line models separating vD from explosive logics.
    DemoLfi,
    /// Interderivable formulas whose disjunctions differ.
    DemoReplacement,
    /// Check random accepted derivations against random finite models.
    FuzzSoundness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
        /// Models sampled per derivation.
        #[arg(long, default_value_t = 100)]
        models: usize,
        #[arg(long, default_value_t = 4)]
        max_points: usize,
        /// Upper bound on the length of random derivations.
        #[arg(long, default_value_t = 50)]
        chain_len: usize,
    },
    /// Enumerate the topologies on `n` points.
    EnumTopologies {
        n: usize,
        /// Print only the number of topologies.
        #[arg(long)]
        count: bool,
        /// Refuse to enumerate above this many points.
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        cap: usize,
    },
    /// Extend a Kuratowski-like operator (JSON file) to a closure operator.
    ExtendClosure { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    target: String,
    /// A hypothesis; repeat for several.
    #[arg(long = "hyp")]
    hyps: Vec<String>,
    /// Largest carrier tried.
    #[arg(long, env = "VD_MAX_POINTS", default_value_t = 4)]
    max_points: usize,
    /// Values tried per disjunction.
    #[arg(long, default_value_t = 8)]
    max_candidates: usize,
    /// Valuations examined per topology.
    #[arg(long, default_value_t = 2_000_000)]
    max_steps: u64,
    /// Wall-clock limit for the whole search.
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

impl SearchArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_points: self.max_points,
            max_oracle_candidates: self.max_candidates,
            max_steps_per_space: self.max_steps,
            time_limit: self.time_limit_ms.map(Duration::from_millis),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {message}")]
    Syntax { path: String, message: String },
    #[error("{path}: schema error at `{pointer}`: {reason}")]
    Schema { path: String, pointer: String, reason: String },
    #[error("{path}: {message}")]
    Invariant { path: String, message: String },
    #[error("unknown corpus entry `{0}` (see `vd check-proof --list`)")]
    UnknownCorpus(String),
}

fn with_path(path: &Path, e: JsonError) -> LoadError {
    let path = path.display().to_string();
    match e {
        JsonError::Syntax(message) => LoadError::Syntax { path, message },
        JsonError::Schema { pointer, reason } => LoadError::Schema { path, pointer, reason },
        JsonError::Invariant(message) => LoadError::Invariant { path, message },
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })
}

pub fn load_model(path: &Path) -> Result<Model, LoadError> {
    codec::model_from_str(&read(path)?).map_err(|e| with_path(path, e))
}

/// Loads a proof script from a file, or a bundled derivation given as
/// `corpus:<name>`.
pub fn load_proof(spec: &str) -> Result<Derivation, LoadError> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        return corpus_entry(name).map(|e| e.derivation).ok_or_else(|| LoadError::UnknownCorpus(name.into()));
    }
    let path = Path::new(spec);
    codec::proof_from_str(&read(path)?).map_err(|e| with_path(path, e))
}

pub fn load_kuratowski_like(path: &Path) -> Result<KuratowskiLike, LoadError> {
    codec::kuratowski_like_from_str(&read(path)?).map_err(|e| with_path(path, e))
}

/// Outcome of a subcommand: text or JSON for stdout plus an exit code.
struct Output {
    code: i32,
    text: String,
    json: Value,
}

impl Output {
    fn new(code: i32, text: String, json: Value) -> Self {
        Output { code, text, json }
    }
}

/// A failure that ends the command before it produces output.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::usage(e)
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExceeded(_) => Failure { code: EXIT_BUDGET, message: e.to_string() },
            other => Failure::usage(other),
        }
    }
}

fn formula_arg(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| Failure::usage(format!("cannot parse `{text}`: {e}")))
}

/// Runs the command line `argv` (including the program name), writing
/// results to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(o) => {
            let printed = if cli.json {
                serde_json::to_string_pretty(&o.json).expect("JSON values serialize") + "\n"
            } else {
                o.text
            };
            let _ = out.write_all(printed.as_bytes());
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Parse { formula } => cmd_parse(formula),
        Command::CheckProof { proof: Some(proof), .. } => cmd_check_proof(proof),
        Command::CheckProof { proof: None, .. } => cmd_list_corpus(),
        Command::Eval { model, formulas } => cmd_eval(model, formulas),
        Command::Entails { model, target, hyps } => cmd_entails(model, target, hyps),
        Command::Refute(args) => cmd_search(args, true),
        Command::FindCountermodel(args) => cmd_search(args, false),
        Command::DemoLfi => Ok(cmd_demo_lfi()),
        Command::DemoReplacement => cmd_demo_replacement(),
        Command::FuzzSoundness { seed, iterations, models, max_points, chain_len } => {
            let cfg = FuzzConfig {
                seed: *seed,
                iterations: *iterations as usize,
                models_per_derivation: *models,
                max_points: *max_points,
                chain_len: *chain_len,
            };
            cmd_fuzz(&cfg)
        }
        Command::EnumTopologies { n, count, cap } => cmd_enum(*n, *count, *cap),
        Command::ExtendClosure { file } => cmd_extend(file),
    }
}

fn cmd_parse(text: &str) -> Result<Output, Failure> {
    let f = formula_arg(text)?;
    let vars: Vec<String> = f.variables().into_iter().collect();
    let json = json!({"formula": f.to_string(), "size": f.size(), "variables": vars});
    Ok(Output::new(EXIT_OK, format!("{f}\n"), json))
}

fn cmd_list_corpus() -> Result<Output, Failure> {
    let mut text = String::new();
    let mut entries = Vec::new();
    for (name, e) in corpus() {
        let verdict = if e.expect_reject.is_some() { "rejected" } else { "accepted" };
        let _ = writeln!(text, "{name:<18} {verdict:<9} {}", e.description);
        entries.push(json!({"name": name, "description": e.description, "expected": verdict}));
    }
    Ok(Output::new(EXIT_OK, text, json!({"corpus": entries})))
}

fn cmd_check_proof(spec: &str) -> Result<Output, Failure> {
    let d = load_proof(spec)?;
    let r = check(&d);
    let mut json = codec::check_report_to_json(&r);
    json["conclusion"] = d.conclusion().map(|c| c.to_string()).into();
    let text = match &r.first_error {
        None => format!(
            "accepted\n{} lines, conclusion: {}\n",
            d.lines.len(),
            d.conclusion().map(|c| c.to_string()).unwrap_or_default()
        ),
        Some((line, e)) => format!("rejected\nline {line}: {e} ({e:?})\n"),
    };
    Ok(Output::new(if r.accepted { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
}

fn cmd_eval(path: &Path, formulas: &[String]) -> Result<Output, Failure> {
    let m = load_model(path)?;
    let fs = formulas.iter().map(|t| formula_arg(t)).collect::<Result<Vec<_>, _>>()?;
    let vals = eval_all(&m, &fs).map_err(Failure::usage)?;
    let mut text = String::new();
    let mut values = serde_json::Map::new();
    for (f, v) in fs.iter().zip(&vals) {
        let _ = writeln!(text, "v({f}) = {v}");
        values.insert(f.to_string(), codec::set_to_json(v));
    }
    Ok(Output::new(EXIT_OK, text, json!({"values": values})))
}

fn cmd_entails(path: &Path, target: &str, hyps: &[String]) -> Result<Output, Failure> {
    let m = load_model(path)?;
    let target = formula_arg(target)?;
    let gamma = hyps.iter().map(|t| formula_arg(t)).collect::<Result<Vec<_>, _>>()?;
    let holds = consequence_in_model(&m, &gamma, &target).map_err(Failure::usage)?;
    let met = meet(&m, &gamma).map_err(Failure::usage)?;
    let value = eval_all(&m, std::slice::from_ref(&target)).map_err(Failure::usage)?.remove(0);
    let text = format!(
        "{}\nmeet of hypotheses: {met}\nv({target}) = {value}\n",
        if holds { "holds" } else { "fails" }
    );
    let json = json!({
        "holds": holds,
        "meet": codec::set_to_json(&met),
        "target": target.to_string(),
        "value": codec::set_to_json(&value),
    });
    Ok(Output::new(if holds { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
}

fn cmd_search(args: &SearchArgs, asserted: bool) -> Result<Output, Failure> {
    let target = formula_arg(&args.target)?;
    let gamma = args.hyps.iter().map(|t| formula_arg(t)).collect::<Result<Vec<_>, _>>()?;
    let budget = args.budget();
    let found = refute_entailment(&gamma, &target, &budget)?;
    let (found_code, none_code) = if asserted { (EXIT_NEGATIVE, EXIT_OK) } else { (EXIT_OK, EXIT_NEGATIVE) };
    Ok(match found {
        Some(report) => {
            let text = format!("countermodel found\n{}", describe_report(&report));
            let mut json = json!({"found": true, "report": codec::report_to_json(&report)});
            json["budget"] = codec::budget_to_json(&budget);
            Output::new(found_code, text, json)
        }
        None => {
            let text = format!(
                "no countermodel on at most {} points within the budget (this is not a proof of {})\n",
                budget.max_points,
                if gamma.is_empty() { "validity" } else { "entailment" }
            );
            let json = json!({"found": false, "budget": codec::budget_to_json(&budget)});
            Output::new(none_code, text, json)
        }
    })
}

fn describe_space(space: &Space) -> String {
    match space {
        Space::Real => "the real line".into(),
        Space::Finite(t) => describe_finite(t),
    }
}

fn describe_finite(t: &FiniteSpace) -> String {
    let opens: Vec<String> = t.opens().iter().map(|&o| set_text(o)).collect();
    format!("{} points, opens {}", t.n(), opens.join(" "))
}

fn set_text(bits: u64) -> String {
    let points: Vec<String> = members(bits).map(|p| p.to_string()).collect();
    format!("{{{}}}", points.join(", "))
}

fn describe_model(m: &Model) -> String {
    let mut s = format!("  space: {}\n", describe_space(&m.space));
    for (name, v) in &m.valuation.vars {
        let _ = writeln!(s, "  v({name}) = {v}");
    }
    for (f, v) in m.valuation.disjunctions() {
        let _ = writeln!(s, "  v({f}) = {v}  (chosen disjunction value)");
    }
    s
}

fn describe_report(r: &CounterexampleReport) -> String {
    let gamma: Vec<String> = r.gamma.iter().map(|g| g.to_string()).collect();
    let mut s = match r.kind {
        ReportKind::RefutesValidity => format!("  {} is not valid\n", r.target),
        ReportKind::RefutesEntailment => format!("  {{{}}} does not entail {}\n", gamma.join(", "), r.target),
    };
    s += &describe_model(&r.model);
    for (f, v) in &r.values {
        let _ = writeln!(s, "  value v({f}) = {v}");
    }
    s
}

fn cmd_demo_lfi() -> Output {
    let witnesses = lfi_witnesses();
    let mut text = String::from("real line with v(p) = [0, 1), v(q) = (2, 3)\n");
    let m = &witnesses[0].model;
    let shared: Vec<Formula> = ["!p", "@p"].iter().map(|t| parse(t).expect("fixed formula")).collect();
    for (f, v) in shared.iter().zip(eval_all(m, &shared).expect("witness model evaluates")) {
        let _ = writeln!(text, "  v({f}) = {v}");
    }
    for w in &witnesses {
        let imp = Formula::imp(w.gamma[0].clone(), Formula::imp(w.gamma[1].clone(), w.target.clone()));
        let _ = writeln!(
            text,
            "{{{}, {}}} does not entail {}: v({imp}) = {}",
            w.gamma[0], w.gamma[1], w.target, w.values[&imp]
        );
    }
    let json = json!({"witnesses": witnesses.iter().map(codec::report_to_json).collect::<Vec<_>>()});
    Output::new(EXIT_OK, text, json)
}

fn cmd_demo_replacement() -> Result<Output, Failure> {
    let w = replacement_failure_witness();
    let verified = w.verify().map_err(Failure::usage)?;
    let v = &w.report.values;
    let text = format!(
        "{l} and {r} are interderivable (corpus: {d0}, {d1})\n{}\
         v({l}) = {}, v({r}) = {}\nv({ld}) = {} but v({rd}) = {}\nso {{{rd}}} does not entail {ld}: replacement fails\nreplay: {}\n",
        describe_model(&w.report.model),
        v[&w.left],
        v[&w.right],
        v[&w.left_disjunction],
        v[&w.right_disjunction],
        if verified { "ok" } else { "FAILED" },
        l = w.left,
        r = w.right,
        ld = w.left_disjunction,
        rd = w.right_disjunction,
        d0 = w.derivations[0],
        d1 = w.derivations[1],
    );
    let json = json!({
        "left": w.left.to_string(),
        "right": w.right.to_string(),
        "left_disjunction": w.left_disjunction.to_string(),
        "right_disjunction": w.right_disjunction.to_string(),
        "derivations": w.derivations,
        "verified": verified,
        "report": codec::report_to_json(&w.report),
    });
    Ok(Output::new(if verified { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
}

fn cmd_fuzz(cfg: &FuzzConfig) -> Result<Output, Failure> {
    if cfg.max_points > 6 {
        return Err(Failure::usage("--max-points above 6 is not supported for fuzzing"));
    }
    let r = fuzz_soundness_with(cfg);
    let mut text = format!(
        "seed {}: {} derivations, {} models, {} line checks, {} violations\n",
        r.seed,
        r.derivations,
        r.models,
        r.line_checks,
        r.violations.len()
    );
    if let Some(v) = r.violations.first() {
        let _ = writeln!(text, "first violation, derivation of {} lines in", v.derivation.lines.len());
        text += &describe_model(&v.model);
    }
    let code = if r.violations.is_empty() { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(Output::new(code, text, codec::fuzz_report_to_json(&r)))
}

fn cmd_enum(n: usize, count: bool, cap: usize) -> Result<Output, Failure> {
    let spaces = enumerate_topologies(n, cap).map_err(Failure::usage)?;
    if count {
        let k = spaces.count();
        return Ok(Output::new(EXIT_OK, format!("{k}\n"), json!({"n": n, "count": k})));
    }
    let spaces: Vec<FiniteSpace> = spaces.collect();
    let mut text = String::new();
    for t in &spaces {
        let opens: Vec<String> = t.opens().iter().map(|&o| set_text(o)).collect();
        let _ = writeln!(text, "{}", opens.join(" "));
    }
    let json = json!({
        "n": n,
        "count": spaces.len(),
        "topologies": spaces.iter().map(codec::finite_space_to_json).collect::<Vec<_>>(),
    });
    Ok(Output::new(EXIT_OK, text, json))
}

fn cmd_extend(path: &Path) -> Result<Output, Failure> {
    let k = load_kuratowski_like(path)?;
    let ext = extend_kuratowski(&k).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut text = String::new();
    let mut closure = Vec::new();
    for (s, &c) in ext.closure.iter().enumerate() {
        let _ = writeln!(text, "cl({}) = {}", set_text(s as u64), set_text(c));
        closure.push(json!({"set": codec::finite_set_to_json(s as u64), "closure": codec::finite_set_to_json(c)}));
    }
    let _ = writeln!(text, "topology: {}", describe_finite(&ext.space));
    let json = json!({"closure": closure, "space": codec::finite_space_to_json(&ext.space)});
    Ok(Output::new(EXIT_OK, text, json))
}
