//! Brute-force equilibrium policies.
//!
//! Every binary policy for the binder is enumerated and played out; a policy
//! is kept when all the interpretations it reaches are equilibrium models of
//! the matrix. Nothing here goes through the elimination procedure in
//! [`crate::qem`], so the two can be checked against each other.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Atom, Binder, Formula, Quantifier};
use crate::policy::{enumerate_policies_capped, Arity, Policy};
use crate::semantics::{equilibrium_models_capped, is_equilibrium_model, Interp3, Sigma, TruthValue, DEFAULT_MAX_DOMAIN};

pub const DEFAULT_MAX_ORACLE: usize = 6;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OracleResult {
    pub policies: BTreeSet<Policy>,
    /// For each accepted policy, the equilibrium models its leaves reach.
    pub witness: BTreeMap<Policy, BTreeSet<Interp3>>,
}

/// Whether `<m, pi>` is an equilibrium configuration of `binder matrix`.
/// Leaves are tested for equilibrium over the whole interpretation reached.
pub fn is_equilibrium_configuration(m: &Interp3, pi: &Policy, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
    let mut leaves = BTreeSet::new();
    if !walk(m.clone(), pi, binder.entries(), &mut leaves)? {
        return Ok(false);
    }
    for leaf in &leaves {
        if !is_total(leaf, matrix) || !is_equilibrium_model(leaf, matrix)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_total(m: &Interp3, matrix: &[Formula]) -> bool {
    matrix.iter().all(|f| m.is_total_over(&f.atoms()))
}

// Follows the binder and the policy in lockstep, collecting the leaves.
// Returns false when the policy shape does not fit the binder.
fn walk(m: Interp3, pi: &Policy, binder: &[(Quantifier, Atom)], out: &mut BTreeSet<Interp3>) -> Result<bool> {
    let Some(((q, x), rest)) = binder.split_first() else {
        return Ok(match pi {
            Policy::Leaf => {
                out.insert(m);
                true
            }
            _ => false,
        });
    };
    match (q, pi) {
        (Quantifier::Exists, Policy::Exists { var, value, sub }) if var == x && value.is_crisp() => {
            walk(m.update(x, *value), sub, rest, out)
        }
        (Quantifier::Forall, Policy::Forall { var, branches }) if var == x => {
            let values: Vec<TruthValue> = branches.iter().map(|(v, _)| *v).collect();
            if values != TruthValue::CLASSICAL {
                return Ok(false);
            }
            for (v, sub) in branches {
                if !walk(m.update(x, *v), sub, rest, out)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Equilibrium policies of `binder matrix` by exhaustive search.
pub fn brute_equilibrium_policies(binder: &Binder, matrix: &[Formula]) -> Result<OracleResult> {
    brute_equilibrium_policies_from(binder, matrix, &Interp3::empty(), DEFAULT_MAX_ORACLE)
}

/// As [`brute_equilibrium_policies`], starting from a crisp interpretation
/// `m` of the atoms outside the binder. Those atoms are held fixed, so
/// minimality is judged over the quantified atoms only.
pub fn brute_equilibrium_policies_from(
    binder: &Binder,
    matrix: &[Formula],
    m: &Interp3,
    cap: usize,
) -> Result<OracleResult> {
    if binder.len() > cap {
        return Err(Error::CapExceeded {
            what: "oracle binder",
            size: binder.len(),
            cap,
        });
    }
    if let Some((a, _)) = m.iter().find(|(_, v)| !v.is_crisp()) {
        return Err(Error::NonCrisp(a.clone()));
    }
    // pin the conditioned atoms: `a` or `~a` as extra premises
    let mut gamma = matrix.to_vec();
    for (a, v) in m.iter() {
        let var = Formula::Var(a.clone());
        gamma.push(if v == TruthValue::One { var } else { Formula::neg(var) });
    }
    let mut domain: Sigma = binder.atoms();
    domain.extend(m.domain());
    for f in matrix {
        for a in f.atoms() {
            if !domain.contains(&a) {
                return Err(Error::UndefinedAtom(a));
            }
        }
    }
    let models = equilibrium_models_capped(&gamma, &domain, DEFAULT_MAX_DOMAIN)?;

    let mut result = OracleResult::default();
    for pi in enumerate_policies_capped(binder, Arity::Binary, cap)? {
        let mut leaves = BTreeSet::new();
        if !walk(m.clone(), &pi, binder.entries(), &mut leaves)? {
            continue;
        }
        if leaves.iter().all(|l| models.contains(l)) {
            result.witness.insert(pi.clone(), leaves);
            result.policies.insert(pi);
        }
    }
    Ok(result)
}
