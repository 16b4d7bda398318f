//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails or exceeds its time limit.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vd_core::formula::{instantiate, parse, Formula};
use vd_core::hilbert::{check, corpus, corpus_entry, deduction_transform, Rejection};
use vd_core::json;
use vd_core::random;
use vd_core::search::{fuzz_soundness_with, lfi_witnesses, replacement_failure_witness, FuzzConfig};
use vd_core::semantics::{consequence_in_model, eval, eval_all, macro_consistency, Model};
use vd_core::topo::finite::{full_mask, random_space};
use vd_core::topo::kuratowski::closure_map;
use vd_core::topo::{check_kuratowski, enumerate_topologies, extend_kuratowski, IntervalSet, KuratowskiLike, PointSet, Space};

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn real(s: &str) -> PointSet {
    PointSet::Real(s.parse::<IntervalSet>().unwrap())
}

fn bundled_derivations() -> Outcome {
    for name in ["thm2.7.i", "thm2.7.ii"] {
        let e = corpus_entry(name).ok_or(format!("missing corpus entry {name}"))?;
        let r = check(&e.derivation);
        ensure(r.accepted, || format!("{name} rejected: {:?}", r.first_error))?;
    }
    let explosive = corpus_entry("thm2.7.i").unwrap().derivation;
    ensure(explosive.hypotheses == vec![f("p"), f("~p")], || "thm2.7.i hypotheses".into())?;
    ensure(explosive.conclusion() == Some(&f("q")), || "thm2.7.i conclusion".into())?;
    let lem = corpus_entry("thm2.7.ii").unwrap().derivation;
    ensure(lem.hypotheses.is_empty() && lem.conclusion() == Some(&f("~p | p")), || "thm2.7.ii shape".into())?;

    let remark = corpus_entry("remark2.4").unwrap();
    let r = check(&remark.derivation);
    ensure(
        r.first_error == Some((1, Rejection::Rule2OnNonTheorem)),
        || format!("remark2.4 first error {:?}", r.first_error),
    )?;
    Ok("thm2.7.i and thm2.7.ii accepted; remark2.4 rejected at line 1 with Rule2OnNonTheorem".into())
}

fn real_line_witnesses() -> Outcome {
    let m = vd_core::search::lfi_model();
    let expected = [
        ("!p", "(-inf, 0] u [1, +inf)"),
        ("@p", "(-inf, 0) u (0, +inf)"),
        ("p -> (!p -> q)", "(-inf, 0) u (0, +inf)"),
        ("@p -> (p -> q)", "(-inf, 0] u [1, +inf)"),
        ("@p -> (!p -> q)", "[0, 1) u (2, 3)"),
    ];
    for (text, want) in expected {
        let got = eval(&m, &f(text)).map_err(|e| e.to_string())?;
        ensure(got == real(want), || format!("v({text}) = {got}, expected {want}"))?;
    }
    for w in lfi_witnesses() {
        ensure(w.replay().map_err(|e| e.to_string())?, || "witness does not replay".into())?;
        let escapes = !w.values[&w.gamma[0]]
            .intersection(&w.values[&w.gamma[1]])
            .unwrap()
            .is_subset(&w.values[&w.target])
            .unwrap();
        ensure(escapes, || "gamma meet inside target".into())?;
    }
    Ok("five values equal as interval sets; three witnesses replay".into())
}

fn soundness() -> Outcome {
    // one independent stream per schema so the sweep parallelizes deterministically
    let checks: usize = (1..=18u8)
        .into_par_iter()
        .map(|id| -> Result<usize, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + u64::from(id));
            let mut checks = 0;
            for _ in 0..1000 {
                let args: Vec<Formula> = (0..3).map(|_| random::formula(&mut rng, &random::DEFAULT_VARS, 2)).collect();
                let inst = instantiate(id, &args).unwrap();
                let fs = [inst.clone()];
                for _ in 0..100 {
                    let space = random::finite_space(&mut rng, 5);
                    let m = random::model(&mut rng, space, &fs).map_err(|e| e.to_string())?;
                    let v = eval(&m, &inst).map_err(|e| e.to_string())?;
                    ensure(v == m.space.full(), || format!("axiom {id} instance `{inst}` not true: {v}"))?;
                    checks += 1;
                }
            }
            Ok(checks)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mp_meaningful = 0;
    for k in 0..10_000 {
        let a = if k % 2 == 0 {
            let args: Vec<Formula> = (0..3).map(|_| random::formula(&mut rng, &random::DEFAULT_VARS, 2)).collect();
            instantiate(rng.gen_range(1..=18), &args).unwrap()
        } else {
            random::formula(&mut rng, &random::DEFAULT_VARS, 3)
        };
        let b = random::formula(&mut rng, &random::DEFAULT_VARS, 3);
        let imp = Formula::imp(a.clone(), b.clone());
        let fs = [a, imp, b];
        let space = random::finite_space(&mut rng, 5);
        let m = random::model(&mut rng, space, &fs).map_err(|e| e.to_string())?;
        let v = eval_all(&m, &fs).map_err(|e| e.to_string())?;
        let full = m.space.full();
        ensure(v[0].intersection(&v[1]).unwrap().is_subset(&v[2]).unwrap(), || format!("MP not locally sound for {}", fs[1]))?;
        if v[0] == full && v[1] == full {
            mp_meaningful += 1;
            ensure(v[2] == full, || format!("MP does not preserve truth for {}", fs[1]))?;
        }
    }

    let mut rule2_meaningful = 0;
    for k in 0..10_000 {
        let a = if k % 2 == 0 {
            let args: Vec<Formula> = (0..3).map(|_| random::formula(&mut rng, &random::DEFAULT_VARS, 2)).collect();
            instantiate(rng.gen_range(1..=18), &args).unwrap()
        } else {
            random::formula(&mut rng, &random::DEFAULT_VARS, 3)
        };
        let concl = Formula::imp(Formula::neg(a.clone()), Formula::class_neg(a.clone()));
        let fs = [a, concl];
        let space = random::finite_space(&mut rng, 5);
        let m = random::model(&mut rng, space, &fs).map_err(|e| e.to_string())?;
        let v = eval_all(&m, &fs).map_err(|e| e.to_string())?;
        if v[0] == m.space.full() {
            rule2_meaningful += 1;
            ensure(v[1] == m.space.full(), || format!("rule 2 does not preserve truth for {}", fs[0]))?;
        }
    }

    let explosive = corpus_entry("thm2.7.i").unwrap().derivation;
    for _ in 0..100 {
        let space = random::finite_space(&mut rng, 4);
        let m = random::model(&mut rng, space, &explosive.hypotheses).map_err(|e| e.to_string())?;
        let m = with_var(m, "q", &mut rng);
        ensure(
            consequence_in_model(&m, &explosive.hypotheses, explosive.conclusion().unwrap()).unwrap(),
            || "thm2.7.i conclusion does not follow in a model".into(),
        )?;
    }

    let fuzz = fuzz_soundness_with(&FuzzConfig::new(2024, 200));
    ensure(fuzz.violations.is_empty(), || format!("{} soundness violations", fuzz.violations.len()))?;
    Ok(format!(
        "{checks} axiom checks, MP {mp_meaningful}/10000 and rule 2 {rule2_meaningful}/10000 with true premises, \
         fuzz: {} derivations x {} models, 0 violations",
        fuzz.derivations,
        fuzz.models / fuzz.derivations.max(1)
    ))
}

fn with_var(mut m: Model, name: &str, rng: &mut ChaCha8Rng) -> Model {
    let s = random::point_set(rng, &m.space);
    m.valuation.vars.insert(name.to_string(), s);
    m
}

fn interior_duality() -> Outcome {
    let mut checked = 0usize;
    for n in [2usize, 3] {
        for t in enumerate_topologies(n, 4).unwrap() {
            for p in 0..=full_mask(n) {
                let lhs = t.complement(t.closure(t.complement(p)));
                ensure(lhs == t.interior(p), || format!("n={n} opens {:?} P={p:#b}", t.opens()))?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10_000 {
        let a = random::interval_set(&mut rng);
        ensure(a.complement().closure().complement() == a.interior(), || format!("fails on {a}"))?;
    }
    Ok(format!("{checked} finite subsets over 33 topologies and 10000 interval sets"))
}

/// A random valid Kuratowski-like operator: a union-closed family closed
/// under the closure of a random topology, with that closure as `hat`.
fn random_kuratowski_like(rng: &mut ChaCha8Rng) -> KuratowskiLike {
    let n = rng.gen_range(1..=4);
    let t = random_space(rng, n);
    let full = full_mask(n);
    let mut family: BTreeSet<u64> = [0, full].into_iter().collect();
    for _ in 0..rng.gen_range(0..=2 * n) {
        family.insert(rng.gen::<u64>() & full);
    }
    loop {
        let mut next = family.clone();
        for &a in &family {
            next.insert(t.closure(a));
            for &b in &family {
                next.insert(a | b);
            }
        }
        if next == family {
            break;
        }
        family = next;
    }
    KuratowskiLike::new(n, family.into_iter().map(|a| (a, t.closure(a))))
}

fn kuratowski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut sizes = 0usize;
    for _ in 0..1000 {
        let k = random_kuratowski_like(&mut rng);
        k.validate().map_err(|e| format!("generator produced an invalid instance: {e}"))?;
        let ext = extend_kuratowski(&k).map_err(|e| e.to_string())?;
        ensure(check_kuratowski(k.n, &ext.closure), || format!("extension of {k:?} is not a closure"))?;
        for (&a, &h) in &k.hat {
            ensure(ext.closure[a as usize] == h, || format!("extension disagrees with hat at {a:#b}"))?;
        }
        ensure(closure_map(&ext.space) == ext.closure, || "induced topology has a different closure".into())?;
        sizes += k.hat.len();
    }
    Ok(format!("1000 instances (mean family size {:.1}) extend to closures agreeing with hat", sizes as f64 / 1000.0))
}

fn brute_force_count(n: usize) -> usize {
    let full = full_mask(n);
    let inner: Vec<u64> = (1..full).collect();
    (0u64..(1 << inner.len()))
        .filter(|mask| {
            let mut fam = vec![0, full];
            fam.extend(inner.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &s)| s));
            fam.iter().all(|a| fam.iter().all(|b| fam.contains(&(a | b)) && fam.contains(&(a & b))))
        })
        .count()
}

fn topology_counts() -> Outcome {
    let mut counts = Vec::new();
    for (n, want) in [(1, 1), (2, 4), (3, 29)] {
        let got = enumerate_topologies(n, 4).unwrap().count();
        let oracle = brute_force_count(n);
        ensure(got == want && oracle == want, || format!("n={n}: enumerated {got}, brute force {oracle}, expected {want}"))?;
        counts.push(got.to_string());
    }
    Ok(format!("counts {} match brute force", counts.join("/")))
}

fn replacement() -> Outcome {
    let w = replacement_failure_witness();
    ensure(w.verify().map_err(|e| e.to_string())?, || "witness does not verify".into())?;
    let m = &w.report.model;
    m.check_disjunctions().map_err(|e| format!("oracle entry inadmissible: {e}"))?;
    let v = eval_all(m, &[w.left.clone(), w.right.clone(), w.left_disjunction.clone(), w.right_disjunction.clone()])
        .map_err(|e| e.to_string())?;
    ensure(v[0] == v[1], || "conjunctions differ".into())?;
    ensure(v[2] != v[3], || "disjunctions agree".into())?;
    for name in w.derivations {
        ensure(check(&corpus_entry(name).unwrap().derivation).accepted, || format!("{name} rejected"))?;
    }
    let back = json::report_from_json(&json::report_to_json(&w.report)).map_err(|e| e.to_string())?;
    ensure(back.replay().map_err(|e| e.to_string())?, || "JSON round trip does not replay".into())?;
    Ok(format!("v(p & q) = v(q & p) = {}, v((p & q) | r) = {}, v((q & p) | r) = {}", v[0], v[2], v[3]))
}

fn macro_consistency_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10_000 {
        let g = random::formula(&mut rng, &random::DEFAULT_VARS, 3);
        let w = random::formula(&mut rng, &random::DEFAULT_VARS, 2);
        let space = if rng.gen_bool(0.2) { Space::Real } else { random::finite_space(&mut rng, 5) };
        let fs = [Formula::class_neg(g.clone()), g.clone(), Formula::bot(w.clone())];
        let m = random::model(&mut rng, space, &fs).map_err(|e| e.to_string())?;
        let v = eval_all(&m, &fs).map_err(|e| e.to_string())?;
        ensure(v[0] == v[1].complement(), || format!("v(~{g}) is not the complement"))?;
        ensure(v[2].is_empty(), || format!("v(bot({w})) is not empty"))?;
        ensure(macro_consistency(&m, &g, &w).map_err(|e| e.to_string())?, || format!("expansion of ~{g} disagrees"))?;
    }
    Ok("10000 triples".into())
}

fn deduction() -> Outcome {
    let mut transformed = 0usize;
    for (name, e) in corpus() {
        if e.expect_reject.is_some() {
            continue;
        }
        for a in &e.derivation.hypotheses {
            let out = deduction_transform(&e.derivation, a).map_err(|err| format!("{name}: {err}"))?;
            let r = check(&out);
            ensure(r.accepted, || format!("{name} discharging {a}: {:?}", r.first_error))?;
            transformed += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut random_count = 0;
    while random_count < 1000 {
        let len = rng.gen_range(5..=40);
        let d = random::derivation(&mut rng, len, &random::DEFAULT_VARS);
        let Some(a) = d.hypotheses.first().cloned() else { continue };
        ensure(check(&d).accepted, || "generator produced a rejected derivation".into())?;
        let out = deduction_transform(&d, &a).map_err(|e| e.to_string())?;
        let r = check(&out);
        ensure(r.accepted, || format!("transform rejected: {:?}", r.first_error))?;
        ensure(
            out.conclusion() == Some(&Formula::imp(a.clone(), d.conclusion().unwrap().clone())),
            || "wrong conclusion".into(),
        )?;
        random_count += 1;
    }
    Ok(format!("{transformed} corpus discharges and 1000 random derivations re-check"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "bundled derivations check", Duration::from_secs(1), bundled_derivations),
        (2, "real-line witness values", Duration::from_secs(1), real_line_witnesses),
        (3, "soundness suite", Duration::from_secs(120), soundness),
        (4, "interior is dual to closure", Duration::from_secs(30), interior_duality),
        (5, "Kuratowski extension", Duration::from_secs(30), kuratowski),
        (6, "topology enumeration counts", Duration::from_secs(10), topology_counts),
        (7, "replacement failure witness", Duration::from_secs(1), replacement),
        (8, "classical negation macro consistency", Duration::from_secs(30), macro_consistency_suite),
        (9, "deduction transform", Duration::from_secs(60), deduction),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(detail) if elapsed <= limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("too slow: {detail}")),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {id} [{tag}] {name} ({:.2?} / limit {:?}): {detail}", elapsed, limit);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
