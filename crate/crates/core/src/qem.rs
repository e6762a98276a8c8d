//! Quantifier elimination for equilibrium policies.
//!
//! [`qem`] eliminates the binder one variable at a time. Each call is
//! conditioned by an interpretation `m` of the atoms not yet eliminated and
//! returns a [`ThetaPair`]: the policies that are equilibrium policies from
//! `m`, and the non-crisp models extending `m` that later steps need in order
//! to rule out non-minimal leaves.
//!
//! When `m` is not crisp no leaf below it can be an equilibrium model, so all
//! models extending `m` go into the non-crisp set and no policy is returned.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{Atom, Binder, Formula, QuantifiedTheory, Quantifier};
use crate::policy::{conforms, contains, members, sat_mixed, Arity, Policy};
use crate::semantics::{
    cmp, eval_theory, is_equilibrium_model, is_model, EvalMode, Interp3, Relation, TruthValue, DEFAULT_MAX_DOMAIN,
};

use TruthValue::{Half, One, Zero};

/// Result of one elimination step.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ThetaPair {
    pub policies: BTreeSet<Policy>,
    /// Non-crisp models of the matrix extending the conditioning interpretation.
    pub noncrisp: BTreeSet<Interp3>,
}

impl ThetaPair {
    pub fn new(policies: impl IntoIterator<Item = Policy>, noncrisp: impl IntoIterator<Item = Interp3>) -> ThetaPair {
        ThetaPair {
            policies: policies.into_iter().collect(),
            noncrisp: noncrisp.into_iter().collect(),
        }
    }
}

/// What a merge needs to know about the step it completes.
#[derive(Clone, Debug)]
pub struct EliminationContext<'a> {
    /// Binder still to eliminate, headed by the variable being merged.
    pub binder: &'a Binder,
    pub matrix: &'a [Formula],
    pub m: &'a Interp3,
}

#[derive(Clone, Copy, Debug)]
pub struct QemOptions {
    /// Keep only the minimal elements of each non-crisp set.
    pub prune_hc: bool,
    /// Record one trace line per elimination step.
    pub trace: bool,
    /// Re-check the pair invariants after every step (panics on violation).
    pub check_invariants: bool,
    pub max_domain: usize,
}

impl Default for QemOptions {
    fn default() -> QemOptions {
        QemOptions {
            prune_hc: false,
            trace: false,
            check_invariants: cfg!(debug_assertions),
            max_domain: DEFAULT_MAX_DOMAIN,
        }
    }
}

// Moves the members of every policy into the non-crisp set when `m` is not crisp.
fn fold(pair: ThetaPair, binder: &Binder, m: &Interp3) -> ThetaPair {
    if m.is_crisp() {
        return pair;
    }
    let mut noncrisp = pair.noncrisp;
    for pi in &pair.policies {
        noncrisp.extend(members(pi, binder, m));
    }
    ThetaPair {
        policies: BTreeSet::new(),
        noncrisp,
    }
}

fn single(q: Quantifier, x: &Atom) -> Binder {
    Binder::new(vec![(q, x.clone())]).expect("one entry has no duplicates")
}

fn value_of(m: &Interp3, matrix: &[Formula]) -> Result<TruthValue> {
    eval_theory(m, matrix, EvalMode::G3)
}

/// Eliminates a last existential `x` from `m`.
pub fn qem_base_exists(x: &Atom, matrix: &[Formula], m: &Interp3) -> Result<ThetaPair> {
    let (m0, mh, m1) = (m.update(x, Zero), m.update(x, Half), m.update(x, One));
    let mut pair = ThetaPair::default();
    let half = value_of(&mh, matrix)?;
    if half == One {
        pair.noncrisp.insert(mh);
    }
    if is_model(&m0, matrix)? {
        pair.policies.insert(Policy::Exists {
            var: x.clone(),
            value: Zero,
            sub: Box::new(Policy::Leaf),
        });
    }
    if half <= Half && is_model(&m1, matrix)? {
        pair.policies.insert(Policy::Exists {
            var: x.clone(),
            value: One,
            sub: Box::new(Policy::Leaf),
        });
    }
    Ok(fold(pair, &single(Quantifier::Exists, x), m))
}

/// Eliminates a last universal `x` from `m`.
pub fn qem_base_forall(x: &Atom, matrix: &[Formula], m: &Interp3) -> Result<ThetaPair> {
    let (m0, mh, m1) = (m.update(x, Zero), m.update(x, Half), m.update(x, One));
    let v0 = value_of(&m0, matrix)?;
    let vh = value_of(&mh, matrix)?;
    let v1 = value_of(&m1, matrix)?;
    let mut pair = ThetaPair::default();
    if v0 == One && vh <= Half && v1 == One {
        pair.policies.insert(Policy::Forall {
            var: x.clone(),
            branches: vec![(Zero, Policy::Leaf), (One, Policy::Leaf)],
        });
    } else {
        if vh == One {
            pair.noncrisp.insert(mh);
        }
        for (mv, v) in [(m0, v0), (m1, v1)] {
            if v == One && !mv.is_crisp() {
                pair.noncrisp.insert(mv);
            }
        }
    }
    Ok(fold(pair, &single(Quantifier::Forall, x), m))
}

// The x=1 candidate survives if none of the interpretations it reaches lies
// above a non-crisp model with x=1/2 or inside a policy found at x=1/2.
fn keep(pi: &Policy, rest: &Binder, m1: &Interp3, half: &ThetaPair) -> Result<bool> {
    for reached in members(pi, rest, m1) {
        for lower in &half.noncrisp {
            if cmp(lower, &reached, None)? == Relation::Less {
                return Ok(false);
            }
        }
        if half.policies.iter().any(|p| contains(p, &reached)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn merged_noncrisp(rest: &Binder, m: &Interp3, x: &Atom, p0: &ThetaPair, ph: &ThetaPair, p1: &ThetaPair) -> BTreeSet<Interp3> {
    let mh = m.update(x, Half);
    let mut out = BTreeSet::new();
    for pi in &ph.policies {
        out.extend(members(pi, rest, &mh));
    }
    for p in [p0, ph, p1] {
        out.extend(p.noncrisp.iter().cloned());
    }
    out
}

fn head(ctx: &EliminationContext<'_>) -> Result<(Atom, Binder)> {
    let ((_, x), rest) = ctx.binder.split_first().ok_or(Error::EmptyBinder)?;
    Ok((x.clone(), rest))
}

/// Merge for a head existential.
pub fn mc_exists(p0: &ThetaPair, ph: &ThetaPair, p1: &ThetaPair, ctx: &EliminationContext<'_>) -> Result<ThetaPair> {
    let (x, rest) = head(ctx)?;
    let m1 = ctx.m.update(&x, One);
    let mut policies = BTreeSet::new();
    for pi in &p0.policies {
        policies.insert(Policy::Exists {
            var: x.clone(),
            value: Zero,
            sub: Box::new(pi.clone()),
        });
    }
    for pi in &p1.policies {
        if keep(pi, &rest, &m1, ph)? {
            policies.insert(Policy::Exists {
                var: x.clone(),
                value: One,
                sub: Box::new(pi.clone()),
            });
        }
    }
    Ok(ThetaPair {
        policies,
        noncrisp: merged_noncrisp(&rest, ctx.m, &x, p0, ph, p1),
    })
}

/// Merge for a head universal.
pub fn mc_forall(p0: &ThetaPair, ph: &ThetaPair, p1: &ThetaPair, ctx: &EliminationContext<'_>) -> Result<ThetaPair> {
    let (x, rest) = head(ctx)?;
    let m1 = ctx.m.update(&x, One);
    let mut kept = Vec::new();
    for pi in &p1.policies {
        if keep(pi, &rest, &m1, ph)? {
            kept.push(pi);
        }
    }
    let mut policies = BTreeSet::new();
    for pi0 in &p0.policies {
        for pi1 in &kept {
            policies.insert(Policy::Forall {
                var: x.clone(),
                branches: vec![(Zero, pi0.clone()), (One, (*pi1).clone())],
            });
        }
    }
    Ok(ThetaPair {
        policies,
        noncrisp: merged_noncrisp(&rest, ctx.m, &x, p0, ph, p1),
    })
}

/// Runs the elimination with options and keeps the trace.
#[derive(Debug)]
pub struct Eliminator<'a> {
    matrix: &'a [Formula],
    options: QemOptions,
    trace: Vec<String>,
}

impl<'a> Eliminator<'a> {
    pub fn new(matrix: &'a [Formula], options: QemOptions) -> Eliminator<'a> {
        Eliminator {
            matrix,
            options,
            trace: Vec::new(),
        }
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<String> {
        self.trace
    }

    pub fn run(&mut self, binder: &Binder, m: &Interp3) -> Result<ThetaPair> {
        let Some(((q, x), rest)) = binder.split_first() else {
            return Err(Error::EmptyBinder);
        };
        let mut pair = if rest.is_empty() {
            match q {
                Quantifier::Exists => qem_base_exists(x, self.matrix, m)?,
                Quantifier::Forall => qem_base_forall(x, self.matrix, m)?,
            }
        } else {
            let mut subs = Vec::with_capacity(3);
            for v in TruthValue::ALL {
                subs.push(self.run(&rest, &m.update(x, v))?);
            }
            let ctx = EliminationContext {
                binder,
                matrix: self.matrix,
                m,
            };
            match q {
                Quantifier::Exists => mc_exists(&subs[0], &subs[1], &subs[2], &ctx)?,
                Quantifier::Forall => mc_forall(&subs[0], &subs[1], &subs[2], &ctx)?,
            }
        };
        if self.options.prune_hc {
            pair.noncrisp = minimal_elements(&pair.noncrisp)?;
        }
        if self.options.check_invariants {
            check_pair(&pair, binder, self.matrix, m)?;
        }
        if self.options.trace {
            self.trace.push(format!(
                "QEM {binder} | m={{{m}}} -> |T|={} |HC|={}",
                pair.policies.len(),
                pair.noncrisp.len()
            ));
        }
        Ok(pair)
    }
}

/// The members of `set` with nothing in `set` strictly below them.
pub fn minimal_elements(set: &BTreeSet<Interp3>) -> Result<BTreeSet<Interp3>> {
    let mut out = BTreeSet::new();
    'outer: for m in set {
        for other in set {
            if cmp(other, m, None)? == Relation::Less {
                continue 'outer;
            }
        }
        out.insert(m.clone());
    }
    Ok(out)
}

// Panics: a violation is a bug in the elimination, not an input error.
fn check_pair(pair: &ThetaPair, binder: &Binder, matrix: &[Formula], m: &Interp3) -> Result<()> {
    for pi in &pair.policies {
        assert!(conforms(pi, binder, Arity::Binary), "{pi} does not conform to {binder}");
        assert!(sat_mixed(m, pi, binder, matrix)?, "{pi} is not satisfied from {{{m}}}");
    }
    for hc in &pair.noncrisp {
        assert!(!hc.is_crisp(), "crisp interpretation {{{hc}}} in the non-crisp set");
        assert!(is_model(hc, matrix)?, "{{{hc}}} in the non-crisp set is not a model");
        assert!(hc.agrees_on(m, &m.domain()), "{{{hc}}} does not extend {{{m}}}");
    }
    Ok(())
}

/// One elimination from `m` with default options.
pub fn qem(binder: &Binder, matrix: &[Formula], m: &Interp3) -> Result<ThetaPair> {
    Eliminator::new(matrix, QemOptions::default()).run(binder, m)
}

/// Equilibrium policies of a theory, with the non-crisp set and trace of the run.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QemOutput {
    pub policies: BTreeSet<Policy>,
    pub noncrisp: BTreeSet<Interp3>,
    pub trace: Vec<String>,
}

/// Equilibrium policies of `theory`.
///
/// Atoms of the matrix outside the binder must be given crisp values in
/// `fixed`; they are held at those values and minimality is judged over the
/// quantified atoms only. An empty binder yields `{lambda}` exactly when
/// `fixed` is an equilibrium model.
pub fn equilibrium_policies(theory: &QuantifiedTheory, fixed: &Interp3, options: QemOptions) -> Result<QemOutput> {
    let domain = theory.atoms();
    if domain.len() > options.max_domain {
        return Err(Error::CapExceeded {
            what: "QEM domain",
            size: domain.len(),
            cap: options.max_domain,
        });
    }
    for a in theory.free_atoms() {
        match fixed.get(&a) {
            None => return Err(Error::FreeVariable(a)),
            Some(v) if !v.is_crisp() => return Err(Error::NonCrisp(a)),
            Some(_) => {}
        }
    }
    if let Some(a) = fixed.domain().into_iter().find(|a| theory.binder.binds(a)) {
        return Err(Error::InvalidInterpretation(format!("`{a}` is bound by the binder")));
    }
    if theory.binder.is_empty() {
        let mut gamma = theory.matrix.clone();
        for (a, v) in fixed.iter() {
            let var = Formula::Var(a.clone());
            gamma.push(if v == One { var } else { Formula::neg(var) });
        }
        let policies = if is_equilibrium_model(fixed, &gamma)? {
            [Policy::Leaf].into_iter().collect()
        } else {
            BTreeSet::new()
        };
        return Ok(QemOutput {
            policies,
            ..QemOutput::default()
        });
    }
    let mut run = Eliminator::new(&theory.matrix, options);
    let pair = run.run(&theory.binder, fixed)?;
    Ok(QemOutput {
        policies: pair.policies,
        noncrisp: pair.noncrisp,
        trace: run.into_trace(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use Quantifier::{Exists, Forall};

    fn phi() -> Vec<Formula> {
        vec![parse_formula("(z -> x) & (z | ~z)").unwrap()]
    }

    fn z() -> Atom {
        Atom::new("z").unwrap()
    }

    fn at(x: TruthValue) -> Interp3 {
        Interp3::of(&[("x", x)])
    }

    fn half_zero() -> Interp3 {
        Interp3::of(&[("x", Half), ("z", Zero)])
    }

    fn ez(v: TruthValue) -> Policy {
        Policy::exists("z", v, Policy::Leaf)
    }

    #[test]
    fn base_exists() {
        assert_eq!(qem_base_exists(&z(), &phi(), &at(Zero)).unwrap(), ThetaPair::new([ez(Zero)], []));
        assert_eq!(qem_base_exists(&z(), &phi(), &at(Half)).unwrap(), ThetaPair::new([], [half_zero()]));
        assert_eq!(
            qem_base_exists(&z(), &phi(), &at(One)).unwrap(),
            ThetaPair::new([ez(Zero), ez(One)], [])
        );
    }

    #[test]
    fn base_forall() {
        assert_eq!(qem_base_forall(&z(), &phi(), &at(Zero)).unwrap(), ThetaPair::default());
        assert_eq!(qem_base_forall(&z(), &phi(), &at(Half)).unwrap(), ThetaPair::new([], [half_zero()]));
        assert_eq!(
            qem_base_forall(&z(), &phi(), &at(One)).unwrap(),
            ThetaPair::new([Policy::forall("z", Policy::Leaf, Policy::Leaf)], [])
        );
    }

    fn merge_inputs() -> (ThetaPair, ThetaPair, ThetaPair) {
        (
            ThetaPair::new([ez(Zero)], []),
            ThetaPair::new([], [half_zero()]),
            ThetaPair::new([ez(Zero), ez(One)], []),
        )
    }

    #[test]
    fn merge_exists() {
        let (p0, ph, p1) = merge_inputs();
        let b = Binder::of(&[(Exists, "x"), (Exists, "z")]);
        let m = Interp3::empty();
        let ctx = EliminationContext { binder: &b, matrix: &phi(), m: &m };
        let got = mc_exists(&p0, &ph, &p1, &ctx).unwrap();
        let expected = ThetaPair::new(
            [
                Policy::exists("x", Zero, ez(Zero)),
                Policy::exists("x", One, ez(One)),
            ],
            [half_zero()],
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn merge_forall() {
        let (p0, ph, p1) = merge_inputs();
        let b = Binder::of(&[(Forall, "x"), (Exists, "z")]);
        let m = Interp3::empty();
        let ctx = EliminationContext { binder: &b, matrix: &phi(), m: &m };
        let got = mc_forall(&p0, &ph, &p1, &ctx).unwrap();
        assert_eq!(got, ThetaPair::new([Policy::forall("x", ez(Zero), ez(One))], [half_zero()]));
    }

    #[test]
    fn empty_merge() {
        let b = Binder::of(&[(Exists, "x"), (Exists, "z")]);
        let m = Interp3::empty();
        let ctx = EliminationContext { binder: &b, matrix: &phi(), m: &m };
        let e = ThetaPair::default();
        assert_eq!(mc_exists(&e, &e, &e, &ctx).unwrap(), e);
        assert_eq!(mc_forall(&e, &e, &e, &ctx).unwrap(), e);
    }

    #[test]
    fn whole_binders() {
        let m = Interp3::empty();
        let t = |b: &[(Quantifier, &str)]| qem(&Binder::of(b), &phi(), &m).unwrap().policies;
        assert_eq!(
            t(&[(Exists, "x"), (Exists, "z")]),
            [Policy::exists("x", Zero, ez(Zero)), Policy::exists("x", One, ez(One))]
                .into_iter()
                .collect()
        );
        assert_eq!(
            t(&[(Forall, "x"), (Exists, "z")]),
            [Policy::forall("x", ez(Zero), ez(One))].into_iter().collect()
        );
        for b in [
            [(Exists, "x"), (Forall, "z")],
            [(Exists, "z"), (Forall, "x")],
            [(Forall, "z"), (Forall, "x")],
            [(Forall, "x"), (Forall, "z")],
        ] {
            assert!(t(&b).is_empty(), "{:?}", b);
        }
    }

    #[test]
    fn empty_binder() {
        assert_eq!(qem(&Binder::empty(), &phi(), &Interp3::empty()), Err(Error::EmptyBinder));
        let t = QuantifiedTheory::new(Binder::empty(), vec![Formula::top()]);
        let out = equilibrium_policies(&t, &Interp3::empty(), QemOptions::default()).unwrap();
        assert_eq!(out.policies, [Policy::Leaf].into_iter().collect());
        let t = QuantifiedTheory::new(Binder::empty(), vec![Formula::Bot]);
        assert!(equilibrium_policies(&t, &Interp3::empty(), QemOptions::default())
            .unwrap()
            .policies
            .is_empty());
    }

    #[test]
    fn free_atoms_need_values() {
        let t = QuantifiedTheory::new(Binder::of(&[(Exists, "z")]), phi());
        assert_eq!(
            equilibrium_policies(&t, &Interp3::empty(), QemOptions::default()),
            Err(Error::FreeVariable(Atom::new("x").unwrap()))
        );
        assert!(matches!(
            equilibrium_policies(&t, &at(Half), QemOptions::default()),
            Err(Error::NonCrisp(_))
        ));
        let out = equilibrium_policies(&t, &at(One), QemOptions::default()).unwrap();
        assert_eq!(out.policies, [ez(Zero), ez(One)].into_iter().collect());
    }

    #[test]
    fn trace_lines() {
        let t = QuantifiedTheory::new(Binder::of(&[(Exists, "x"), (Exists, "z")]), phi());
        let options = QemOptions {
            trace: true,
            ..QemOptions::default()
        };
        let out = equilibrium_policies(&t, &Interp3::empty(), options).unwrap();
        assert_eq!(out.trace.len(), 4);
        assert_eq!(out.trace[0], "QEM exists z. | m={x=0} -> |T|=1 |HC|=0");
        assert_eq!(out.trace[3], "QEM exists x. exists z. | m={} -> |T|=2 |HC|=1");
    }
}
