//! Shared instances for the integration tests.
#![allow(dead_code)]

use qep_core::formula::{parse_formula, Atom, Binder, Formula, QuantifiedTheory, Quantifier};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_9e0d;

/// Matrices over `x` and `z`.
pub const POOL: [&str; 30] = [
    "(z -> x) & (z | ~z)",
    "x",
    "z",
    "x | z",
    "x & z",
    "x -> z",
    "z -> x",
    "~x",
    "~z",
    "~~x",
    "x | ~x",
    "z | ~z",
    "(x | ~x) & (z | ~z)",
    "~x -> z",
    "~z -> x",
    "(~x -> z) & (~z -> x)",
    "~x & ~z",
    "~(x & z)",
    "x -> ~z",
    "~~z -> x",
    "(x -> z) & (z -> x)",
    "x | ~z",
    "~x | z",
    "(x | z) & ~(x & z)",
    "~~x & ~~z",
    "(z -> x) & (x -> ~~z)",
    "true",
    "bot",
    "(x -> bot) | z",
    "((x -> z) -> x) & (z | ~z)",
];

pub fn formula(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn pool() -> Vec<Vec<Formula>> {
    POOL.iter().map(|s| vec![formula(s)]).collect()
}

fn atom(name: &str) -> Atom {
    Atom::new(name).unwrap()
}

/// Every quantifier pattern over `vars`, in every variable order.
pub fn binders(vars: &[&str]) -> Vec<Binder> {
    let mut orders: Vec<Vec<&str>> = vec![vec![]];
    for _ in vars {
        orders = orders
            .into_iter()
            .flat_map(|o| {
                vars.iter()
                    .filter(|v| !o.contains(v))
                    .map(|v| {
                        let mut n = o.clone();
                        n.push(v);
                        n
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out = Vec::new();
    for order in &orders {
        for mask in 0..(1u32 << vars.len()) {
            let entries = order
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let q = if mask >> i & 1 == 1 { Quantifier::Forall } else { Quantifier::Exists };
                    (q, atom(v))
                })
                .collect();
            out.push(Binder::new(entries).unwrap());
        }
    }
    out
}

/// A random formula over `atoms` and `bot`, nested at most `depth` deep.
pub fn random_formula(rng: &mut impl Rng, atoms: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 8) {
            Formula::Bot
        } else {
            Formula::var(atoms.choose(rng).unwrap())
        };
    }
    let l = random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::neg(l),
        1 => Formula::and(l, random_formula(rng, atoms, depth - 1)),
        2 => Formula::or(l, random_formula(rng, atoms, depth - 1)),
        _ => Formula::implies(l, random_formula(rng, atoms, depth - 1)),
    }
}

/// A random theory whose binder quantifies exactly `atoms`, in random order.
pub fn random_theory(rng: &mut impl Rng, atoms: &[&str]) -> QuantifiedTheory {
    let mut order = atoms.to_vec();
    order.shuffle(rng);
    let entries = order
        .iter()
        .map(|v| {
            let q = if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
            (q, atom(v))
        })
        .collect();
    let n = rng.gen_range(1..=3);
    let matrix = (0..n).map(|_| random_formula(rng, atoms, 3)).collect();
    QuantifiedTheory::new(Binder::new(entries).unwrap(), matrix)
}

/// The two-variable pool under all eight binders, then 200 random
/// three-variable theories.
pub fn corpus() -> Vec<QuantifiedTheory> {
    let mut out = Vec::new();
    for matrix in pool() {
        for b in binders(&["x", "z"]) {
            out.push(QuantifiedTheory::new(b, matrix.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..200 {
        out.push(random_theory(&mut rng, &["x", "y", "z"]));
    }
    out
}

pub fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + offset)
}

/// Every formula over `atoms` and `bot` built with at most `depth` nested
/// binary connectives. Negations appear as `f -> bot`.
pub fn formulas_up_to_depth(atoms: &[&str], depth: u32) -> Vec<Formula> {
    let mut level: Vec<Formula> = atoms.iter().map(|a| Formula::var(a)).collect();
    level.push(Formula::Bot);
    for _ in 0..depth {
        let mut next = level.clone();
        for l in &level {
            for r in &level {
                next.push(Formula::and(l.clone(), r.clone()));
                next.push(Formula::or(l.clone(), r.clone()));
                next.push(Formula::implies(l.clone(), r.clone()));
            }
        }
        level = next;
    }
    level
}

pub mod props {
    use std::collections::BTreeSet;

    use qep_core::formula::{Atom, Formula};
    use qep_core::semantics::{crisp, equilibrium_models, eval2, eval3, Interp3, Sigma, TruthValue};

    /// Crisp projections evaluate classically.
    pub fn crisp_is_classical(m: &Interp3, f: &Formula) -> bool {
        let c = crisp(m, None);
        let v = eval3(&c, f).unwrap();
        v.is_crisp() && eval2(&c, f).unwrap() == v
    }

    /// Persistency: a non-zero value stays true after lifting, zero stays zero.
    pub fn persistency(m: &Interp3, f: &Formula) -> bool {
        let c = eval3(&crisp(m, None), f).unwrap();
        match eval3(m, f).unwrap() {
            TruthValue::Zero => c == TruthValue::Zero,
            _ => c == TruthValue::One,
        }
    }

    pub fn negation_is_crisp_zero(m: &Interp3, f: &Formula) -> bool {
        let neg = eval3(m, &Formula::neg(f.clone())).unwrap() == TruthValue::One;
        neg == (eval3(&crisp(m, None), f).unwrap() == TruthValue::Zero)
    }

    fn with(gamma: &[Formula], extra: Formula) -> Vec<Formula> {
        let mut g = gamma.to_vec();
        g.push(extra);
        g
    }

    fn filtered(models: &BTreeSet<Interp3>, x: &Atom, v: TruthValue) -> BTreeSet<Interp3> {
        models.iter().filter(|m| m.get(x) == Some(v)).cloned().collect()
    }

    /// For one theory and atom, given its equilibrium models: `~~x` keeps the
    /// models with x true, `~x` those with x false, and `~~x` models survive
    /// with the fact `x`.
    pub fn augmentation_props(gamma: &[Formula], models: &BTreeSet<Interp3>, x: &Atom, domain: &Sigma) -> [bool; 3] {
        let var = Formula::Var(x.clone());
        let double = equilibrium_models(&with(gamma, Formula::neg(Formula::neg(var.clone()))), domain).unwrap();
        let single = equilibrium_models(&with(gamma, Formula::neg(var.clone())), domain).unwrap();
        let fact = equilibrium_models(&with(gamma, var), domain).unwrap();
        [
            double == filtered(models, x, TruthValue::One),
            single == filtered(models, x, TruthValue::Zero),
            double.is_subset(&fact),
        ]
    }
}
