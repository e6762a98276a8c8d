mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qep_core::formula::{parse_formula, print_formula, Atom, Binder, Formula, Quantifier};
use qep_core::policy::{
    contains, count_policies, enumerate_policies, from_json, members, sat_classical, sat_mixed, to_json, Arity,
};
use qep_core::qasp::{accepted_policies, sat_qasp, SemanticsKind};
use qep_core::semantics::{all_interpretations, cmp, equilibrium_models, is_model, Interp3, Relation, TruthValue};

fn formula_strategy(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Bot),
        6 => prop::sample::select(atoms).prop_map(Formula::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
}

fn interp_strategy(atoms: &'static [&'static str]) -> impl Strategy<Value = Interp3> {
    prop::collection::vec(prop::sample::select(&TruthValue::ALL[..]), atoms.len()).prop_map(move |vs| {
        atoms
            .iter()
            .zip(vs)
            .map(|(a, v)| (Atom::new(a).unwrap(), v))
            .collect()
    })
}

const XYZ: &[&str] = &["x", "y", "z"];

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(f in formula_strategy(XYZ)) {
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn interpretation_text_round_trips(m in interp_strategy(XYZ)) {
        prop_assert_eq!(m.to_string().parse::<Interp3>().unwrap(), m);
    }

    #[test]
    fn crisp_props_on_random_inputs(f in formula_strategy(&["a", "b", "c", "d"]), m in interp_strategy(&["a", "b", "c", "d"])) {
        prop_assert!(common::props::crisp_is_classical(&m, &f));
        prop_assert!(common::props::persistency(&m, &f));
        prop_assert!(common::props::negation_is_crisp_zero(&m, &f));
    }

    #[test]
    fn qasp_sat_iff_some_policy_accepted(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let t = common::random_theory(&mut rng, XYZ);
        for kind in [SemanticsKind::Fandinno, SemanticsKind::Stephan] {
            prop_assert_eq!(sat_qasp(&t, kind).unwrap(), !accepted_policies(&t, kind).unwrap().is_empty());
        }
        // every ~~x choice that works also works with the fact x
        let f = accepted_policies(&t, SemanticsKind::Fandinno).unwrap();
        let s = accepted_policies(&t, SemanticsKind::Stephan).unwrap();
        prop_assert!(f.is_subset(&s), "{}", t);
    }
}

fn sigma(atoms: &[&str]) -> BTreeSet<Atom> {
    atoms.iter().map(|a| Atom::new(a).unwrap()).collect()
}

#[test]
fn equilibrium_models_match_literal_minimality() {
    let domain = sigma(XYZ);
    let everything = all_interpretations(&domain, &TruthValue::ALL);
    for f in common::formulas_up_to_depth(XYZ, 1).into_iter().chain(common::pool().into_iter().flatten()) {
        let gamma = [f];
        let models: Vec<&Interp3> = everything.iter().filter(|m| is_model(m, &gamma).unwrap_or(false)).collect();
        let mut literal = BTreeSet::new();
        for m in everything.iter().filter(|m| m.is_crisp()) {
            if !models.contains(&m) {
                continue;
            }
            let minimal = models.iter().all(|o| cmp(o, m, None).unwrap() != Relation::Less);
            if minimal {
                literal.insert(m.clone());
            }
        }
        // pool formulas mention only x and z; the domain still includes y
        assert_eq!(equilibrium_models(&gamma, &domain).unwrap(), literal, "{}", gamma[0]);
    }
}

#[test]
fn enumeration_matches_counts_and_is_sorted() {
    for vars in [&["x"][..], &["x", "z"], &["x", "y", "z"]] {
        for b in common::binders(vars) {
            for arity in [Arity::Binary, Arity::Ternary] {
                let all: Vec<_> = enumerate_policies(&b, arity).unwrap().collect();
                assert_eq!(Some(all.len() as u128), count_policies(&b, arity), "{b}");
                assert!(all.windows(2).all(|w| w[0] < w[1]), "{b} not strictly sorted");
            }
        }
    }
}

#[test]
fn policy_json_round_trips() {
    for b in common::binders(&["x", "y", "z"]) {
        for arity in [Arity::Binary, Arity::Ternary] {
            for pi in enumerate_policies(&b, arity).unwrap().take(200) {
                assert_eq!(from_json(&to_json(&pi)).unwrap(), pi);
            }
        }
    }
}

#[test]
fn members_follow_universal_branching() {
    for b in common::binders(&["x", "y", "z"]) {
        let universals = b.entries().iter().filter(|(q, _)| *q == Quantifier::Forall).count() as u32;
        for pi in enumerate_policies(&b, Arity::Binary).unwrap() {
            let ms = members(&pi, &b, &Interp3::empty());
            assert_eq!(ms.len(), 2usize.pow(universals));
            assert!(ms.iter().all(|m| contains(&pi, m) && m.is_crisp()));
        }
        for pi in enumerate_policies(&b, Arity::Ternary).unwrap().take(50) {
            assert_eq!(members(&pi, &b, &Interp3::empty()).len(), 3usize.pow(universals));
        }
    }
}

#[test]
fn mixed_and_classical_agree_on_crisp_starts() {
    let matrices = common::pool();
    let b = Binder::of(&[(Quantifier::Exists, "z")]);
    for matrix in &matrices {
        for x in TruthValue::CLASSICAL {
            let m = Interp3::of(&[("x", x)]);
            for pi in enumerate_policies(&b, Arity::Binary).unwrap() {
                assert_eq!(
                    sat_mixed(&m, &pi, &b, matrix).unwrap(),
                    sat_classical(&m, &pi, &b, matrix).unwrap()
                );
            }
        }
    }
}
