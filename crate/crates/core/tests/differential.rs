mod common;

use qep_core::formula::Binder;
use qep_core::oracle::brute_equilibrium_policies;
use qep_core::policy::members;
use qep_core::qem::{qem, Eliminator, QemOptions};
use qep_core::semantics::{equilibrium_models, Interp3};

#[test]
fn qem_matches_oracle_on_corpus() {
    for t in common::corpus() {
        let got = qem(&t.binder, &t.matrix, &Interp3::empty()).unwrap().policies;
        let want = brute_equilibrium_policies(&t.binder, &t.matrix).unwrap().policies;
        assert_eq!(got, want, "{t}");
    }
}

#[test]
fn qem_matches_oracle_on_four_variables() {
    let mut rng = common::rng(4);
    for _ in 0..300 {
        let t = common::random_theory(&mut rng, &["a", "b", "c", "d"]);
        let got = qem(&t.binder, &t.matrix, &Interp3::empty()).unwrap().policies;
        let want = brute_equilibrium_policies(&t.binder, &t.matrix).unwrap().policies;
        assert_eq!(got, want, "{t}");
    }
}

#[test]
fn pruning_keeps_the_same_policies() {
    let pruned = QemOptions {
        prune_hc: true,
        ..QemOptions::default()
    };
    for t in common::corpus() {
        let plain = qem(&t.binder, &t.matrix, &Interp3::empty()).unwrap();
        let small = Eliminator::new(&t.matrix, pruned).run(&t.binder, &Interp3::empty()).unwrap();
        assert_eq!(plain.policies, small.policies, "{t}");
        assert!(small.noncrisp.is_subset(&plain.noncrisp));
    }
}

#[test]
fn leaves_are_equilibrium_models() {
    for t in common::corpus() {
        let ems = equilibrium_models(&t.matrix, &t.atoms()).unwrap();
        for pi in qem(&t.binder, &t.matrix, &Interp3::empty()).unwrap().policies {
            for m in members(&pi, &t.binder, &Interp3::empty()) {
                assert!(m.is_crisp() && ems.contains(&m), "{t}: {pi} reaches {m}");
            }
        }
    }
}

#[test]
fn oracle_witnesses_are_equilibrium_models() {
    for t in common::corpus() {
        let ems = equilibrium_models(&t.matrix, &t.atoms()).unwrap();
        let r = brute_equilibrium_policies(&t.binder, &t.matrix).unwrap();
        assert_eq!(r.policies.len(), r.witness.len());
        for leaves in r.witness.values() {
            assert!(leaves.is_subset(&ems), "{t}");
        }
    }
}

#[test]
fn swapping_two_existentials_reroots_the_tree() {
    let phi = vec![common::formula("(z -> x) & (z | ~z)")];
    let xz = Binder::of(&[(qep_core::Quantifier::Exists, "x"), (qep_core::Quantifier::Exists, "z")]);
    let zx = Binder::of(&[(qep_core::Quantifier::Exists, "z"), (qep_core::Quantifier::Exists, "x")]);
    let reached = |b: &Binder| {
        qem(b, &phi, &Interp3::empty())
            .unwrap()
            .policies
            .iter()
            .flat_map(|pi| members(pi, b, &Interp3::empty()))
            .collect::<std::collections::BTreeSet<_>>()
    };
    assert_eq!(reached(&xz), reached(&zx));
}
