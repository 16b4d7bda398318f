use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vd_core::formula::{contract_defs, expand_defs, instantiate, match_schema, parse, schema, Formula, MatchBinding, METAVARS};
use vd_core::hilbert::{check, deduction_transform};
use vd_core::random;
use vd_core::semantics::{eval, eval_all, is_true, macro_consistency};
use vd_core::topo::{Bound, FiniteSpace, Interval, IntervalSet, PointSet, Space};

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![Just("p"), Just("q"), Just("r"), Just("s1")].prop_map(Formula::var)
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::circ),
            inner.clone().prop_map(Formula::class_neg),
            inner.prop_map(Formula::bot),
        ]
    })
}

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    any::<u64>().prop_map(|seed| random::interval_set(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn space_and_set() -> impl Strategy<Value = (FiniteSpace, u64)> {
    (0usize..=6, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = vd_core::topo::finite::random_space(&mut rng, n);
        let s = seed.rotate_left(17) & t.full();
        (t, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn schema_instances_match_their_schema(id in 1u8..=18, a in formula(), b in formula(), c in formula()) {
        let inst = instantiate(id, &[a.clone(), b.clone(), c.clone()]).unwrap();
        let binding = match_schema(&inst, schema(id).unwrap()).expect("instance matches");
        let pattern = &schema(id).unwrap().pattern;
        prop_assert_eq!(pattern.substitute(&binding), inst);
        for (m, arg) in METAVARS.iter().zip([&a, &b, &c]) {
            if let Some(bound) = binding.get(*m) {
                prop_assert_eq!(bound, arg);
            }
        }
    }

    #[test]
    fn substitution_commutes_with_printing(f in formula(), g in formula()) {
        let binding: MatchBinding = [("p".to_string(), g.clone())].into_iter().collect();
        let direct = f.substitute(&binding);
        let via_text = parse(&f.to_string()).unwrap().substitute(&binding);
        prop_assert_eq!(&direct, &via_text);
        prop_assert!(direct.size() >= f.size());
    }

    #[test]
    fn expansion_removes_classical_negation(f in formula(), w in formula()) {
        let e = expand_defs(&f, &w);
        prop_assert!(!e.contains_class_neg());
        prop_assert_eq!(expand_defs(&e, &w), e.clone());
        prop_assert_eq!(contract_defs(&e), contract_defs(&f));
        prop_assert_eq!(contract_defs(&contract_defs(&f)), contract_defs(&f));
    }

    #[test]
    fn interval_boolean_laws(a in interval_set(), b in interval_set(), c in interval_set()) {
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.intersection(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.intersection(&b.union(&c)), a.intersection(&b).union(&a.intersection(&c)));
        prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
        prop_assert!(a.intersection(&b).is_subset(&a));
        prop_assert!(a.is_subset(&a.union(&b)));
        prop_assert_eq!(a.to_string().parse::<IntervalSet>().unwrap(), a);
    }

    #[test]
    fn interval_closure_laws(a in interval_set(), b in interval_set()) {
        prop_assert_eq!(a.complement().closure().complement(), a.interior());
        prop_assert!(a.is_subset(&a.closure()));
        prop_assert!(a.interior().is_subset(&a));
        prop_assert_eq!(a.closure().closure(), a.closure());
        prop_assert_eq!(a.interior().interior(), a.interior());
        prop_assert_eq!(a.union(&b).closure(), a.closure().union(&b.closure()));
        prop_assert_eq!(a.intersection(&b).interior(), a.interior().intersection(&b.interior()));
        prop_assert!(IntervalSet::empty().closure().is_empty());
    }

    #[test]
    fn finite_interior_is_dual_to_closure((t, s) in space_and_set()) {
        prop_assert_eq!(t.complement(t.closure(t.complement(s))), t.interior(s));
        prop_assert!(t.is_open(t.interior(s)));
        prop_assert!(t.is_open(t.complement(t.closure(s))));
    }

    #[test]
    fn defined_connectives_behave(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::formula(&mut rng, &random::DEFAULT_VARS, 3);
        let w = random::formula(&mut rng, &random::DEFAULT_VARS, 2);
        let space = if seed % 5 == 0 { Space::Real } else { random::finite_space(&mut rng, 4) };
        let m = random::model(&mut rng, space, &[f.clone(), w.clone()]).unwrap();
        let vals = eval_all(&m, &[Formula::class_neg(f.clone()), f.clone(), Formula::bot(w.clone())]).unwrap();
        prop_assert_eq!(&vals[0], &vals[1].complement());
        prop_assert!(vals[2].is_empty());
        prop_assert!(macro_consistency(&m, &f, &w).unwrap());
    }

    #[test]
    fn deduction_transform_is_accepted(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random::derivation(&mut rng, 20, &random::DEFAULT_VARS);
        for a in d.hypotheses.clone() {
            let out = deduction_transform(&d, &a).unwrap();
            let r = check(&out);
            prop_assert!(r.accepted, "{:?}", r.first_error);
            prop_assert_eq!(out.conclusion().unwrap(), &Formula::imp(a.clone(), d.conclusion().unwrap().clone()));
            prop_assert!(!out.hypotheses.contains(&a));
        }
    }
}

#[test]
fn topological_values_on_a_chain() {
    // 0 ≤ 1 ≤ 2 with up-sets open
    let t = FiniteSpace::new(3, [0, 0b100, 0b110, 0b111]).unwrap();
    let m = vd_core::Model::new(
        Space::Finite(t),
        vd_core::Valuation::new().with_var("p", PointSet::finite(3, 0b010)),
    )
    .unwrap();
    let v = |s: &str| eval(&m, &parse(s).unwrap()).unwrap();
    assert_eq!(v("!p"), PointSet::finite(3, 0b111));
    assert_eq!(v("@p"), PointSet::finite(3, 0b101));
    assert_eq!(v("p & !p"), PointSet::finite(3, 0b010));
    assert!(is_true(&m, &parse("@p | (p & !p)").unwrap()).unwrap());
}

#[test]
fn interval_endpoints_are_exact() {
    let half = num_rational::Rational64::new(1, 2);
    let i = Interval::new(Bound::Finite(-half), true, Bound::Finite(half), false).unwrap();
    let s = IntervalSet::from_interval(i);
    assert!(!s.contains(-half));
    assert!(s.contains(half));
    assert_eq!(s.to_string(), "(-1/2, 1/2]");
    assert_eq!(s.closure().to_string(), "[-1/2, 1/2]");
    assert_eq!(s.interior().to_string(), "(-1/2, 1/2)");
}
