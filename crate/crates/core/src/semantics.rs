//! Three-valued Gödel logic: truth values, interpretations, evaluation,
//! crisp projection, the truth orderings and equilibrium models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{matrix_atoms, Atom, Binder, Formula, Quantifier};

/// Default cap on the number of atoms an equilibrium-model enumeration may range over.
pub const DEFAULT_MAX_DOMAIN: usize = 20;

/// A value of G3, ordered `0 < 1/2 < 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TruthValue {
    Zero,
    Half,
    One,
}

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [TruthValue::Zero, TruthValue::Half, TruthValue::One];
    pub const CLASSICAL: [TruthValue; 2] = [TruthValue::Zero, TruthValue::One];

    pub fn is_crisp(self) -> bool {
        self != TruthValue::Half
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TruthValue::Zero => "0",
            TruthValue::Half => "1/2",
            TruthValue::One => "1",
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TruthValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<TruthValue> {
        match s.trim() {
            "0" => Ok(TruthValue::Zero),
            "1/2" | "0.5" => Ok(TruthValue::Half),
            "1" => Ok(TruthValue::One),
            other => Err(Error::InvalidTruthValue(other.to_string())),
        }
    }
}

/// A set of atoms, used to restrict crisp projection and the orderings.
pub type Sigma = BTreeSet<Atom>;

/// A partial map from atoms to truth values.
///
/// Displayed (and parsed) as a sorted `atom=value` list such as `x=1/2, z=0`;
/// the empty interpretation displays as the empty string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Interp3 {
    values: BTreeMap<Atom, TruthValue>,
}

impl Interp3 {
    /// The interpretation defined nowhere.
    pub fn empty() -> Interp3 {
        Interp3::default()
    }

    /// Builds an interpretation from `(name, value)` pairs; panics on a bad name.
    pub fn of(pairs: &[(&str, TruthValue)]) -> Interp3 {
        pairs
            .iter()
            .map(|&(x, v)| (Atom::new(x).expect("invalid atom name"), v))
            .collect()
    }

    pub fn get(&self, x: &Atom) -> Option<TruthValue> {
        self.values.get(x).copied()
    }

    pub fn set(&mut self, x: Atom, v: TruthValue) {
        self.values.insert(x, v);
    }

    /// The interpretation that maps `x` to `v` and agrees with `self` elsewhere.
    pub fn update(&self, x: &Atom, v: TruthValue) -> Interp3 {
        let mut out = self.clone();
        out.set(x.clone(), v);
        out
    }

    pub fn domain(&self) -> BTreeSet<Atom> {
        self.values.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, TruthValue)> {
        self.values.iter().map(|(a, v)| (a, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_total_over<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        atoms.into_iter().all(|a| self.values.contains_key(a))
    }

    /// No atom of the domain is mapped to 1/2.
    pub fn is_crisp(&self) -> bool {
        self.values.values().all(|v| v.is_crisp())
    }

    pub fn restrict(&self, atoms: &Sigma) -> Interp3 {
        self.iter()
            .filter(|(a, _)| atoms.contains(*a))
            .map(|(a, v)| (a.clone(), v))
            .collect()
    }

    /// Agreement on every atom of `atoms` (both undefined counts as agreement).
    pub fn agrees_on<'a>(&self, other: &Interp3, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        atoms.into_iter().all(|a| self.get(a) == other.get(a))
    }
}

impl FromIterator<(Atom, TruthValue)> for Interp3 {
    fn from_iter<I: IntoIterator<Item = (Atom, TruthValue)>>(iter: I) -> Interp3 {
        Interp3 {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Interp3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for Interp3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Interp3> {
        let mut out = Interp3::empty();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInterpretation(format!("`{part}` is not atom=value")))?;
            let atom = Atom::new(name.trim())?;
            if out.get(&atom).is_some() {
                return Err(Error::InvalidInterpretation(format!("`{atom}` assigned twice")));
            }
            out.set(atom, value.parse()?);
        }
        Ok(out)
    }
}

/// The value of `f` under `m` in G3.
pub fn eval3(m: &Interp3, f: &Formula) -> Result<TruthValue> {
    Ok(match f {
        Formula::Bot => TruthValue::Zero,
        Formula::Var(a) => m.get(a).ok_or_else(|| Error::UndefinedAtom(a.clone()))?,
        Formula::And(l, r) => eval3(m, l)?.min(eval3(m, r)?),
        Formula::Or(l, r) => eval3(m, l)?.max(eval3(m, r)?),
        Formula::Implies(l, r) => {
            let (a, b) = (eval3(m, l)?, eval3(m, r)?);
            if a <= b {
                TruthValue::One
            } else {
                b
            }
        }
    })
}

/// Classical evaluation; every atom reached must carry 0 or 1.
pub fn eval2(m: &Interp3, f: &Formula) -> Result<TruthValue> {
    Ok(match f {
        Formula::Bot => TruthValue::Zero,
        Formula::Var(a) => match m.get(a) {
            None => return Err(Error::UndefinedAtom(a.clone())),
            Some(TruthValue::Half) => return Err(Error::NonCrisp(a.clone())),
            Some(v) => v,
        },
        Formula::And(l, r) => eval2(m, l)?.min(eval2(m, r)?),
        Formula::Or(l, r) => eval2(m, l)?.max(eval2(m, r)?),
        Formula::Implies(l, r) => {
            if eval2(m, l)? <= eval2(m, r)? {
                TruthValue::One
            } else {
                TruthValue::Zero
            }
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EvalMode {
    Classical,
    G3,
}

/// Minimum over the members of `gamma`; the empty theory is worth 1.
pub fn eval_theory(m: &Interp3, gamma: &[Formula], mode: EvalMode) -> Result<TruthValue> {
    let mut acc = TruthValue::One;
    for f in gamma {
        let v = match mode {
            EvalMode::Classical => eval2(m, f)?,
            EvalMode::G3 => eval3(m, f)?,
        };
        acc = acc.min(v);
    }
    Ok(acc)
}

/// `m` with every 1/2 inside `sigma` lifted to 1. `None` means all atoms.
pub fn crisp(m: &Interp3, sigma: Option<&Sigma>) -> Interp3 {
    m.iter()
        .map(|(a, v)| {
            let lifted = v == TruthValue::Half && sigma.is_none_or(|s| s.contains(a));
            (a.clone(), if lifted { TruthValue::One } else { v })
        })
        .collect()
}

/// Outcome of comparing two interpretations under the truth ordering over a set of atoms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    /// Pointwise equal on the atoms.
    Equal,
    /// Same crisp projection, left pointwise below right, not equal.
    Less,
    /// The mirror of `Less`.
    Greater,
    Incomparable,
}

impl Relation {
    pub fn is_leq(self) -> bool {
        matches!(self, Relation::Equal | Relation::Less)
    }

    pub fn is_lt(self) -> bool {
        self == Relation::Less
    }
}

/// Compares `m` with `m2` over `sigma` (`None`: every atom defined by either side).
pub fn cmp(m: &Interp3, m2: &Interp3, sigma: Option<&Sigma>) -> Result<Relation> {
    let owned;
    let sigma = match sigma {
        Some(s) => s,
        None => {
            let mut all = m.domain();
            all.extend(m2.domain());
            owned = all;
            &owned
        }
    };
    let (mut below, mut above) = (false, false);
    for a in sigma {
        let u = m.get(a).ok_or_else(|| Error::UndefinedAtom(a.clone()))?;
        let w = m2.get(a).ok_or_else(|| Error::UndefinedAtom(a.clone()))?;
        // crisp projections must agree: 0 stays 0, anything else becomes 1
        if (u == TruthValue::Zero) != (w == TruthValue::Zero) {
            return Ok(Relation::Incomparable);
        }
        below |= u < w;
        above |= u > w;
    }
    Ok(match (below, above) {
        (false, false) => Relation::Equal,
        (true, false) => Relation::Less,
        (false, true) => Relation::Greater,
        (true, true) => Relation::Incomparable,
    })
}

/// `m < m2` in the truth ordering over `sigma`.
pub fn lt(m: &Interp3, m2: &Interp3, sigma: Option<&Sigma>) -> Result<bool> {
    Ok(cmp(m, m2, sigma)?.is_lt())
}

pub fn is_model(m: &Interp3, gamma: &[Formula]) -> Result<bool> {
    Ok(eval_theory(m, gamma, EvalMode::G3)? == TruthValue::One)
}

/// Whether `m` is an equilibrium model of `gamma`: a crisp model such that no
/// interpretation obtained by lowering some of its true atoms to 1/2 is a model.
///
/// Lowering true atoms to 1/2 generates exactly the interpretations strictly
/// below a crisp `m` in the truth ordering over `m`'s domain.
pub fn is_equilibrium_model(m: &Interp3, gamma: &[Formula]) -> Result<bool> {
    if !m.is_crisp() || !is_model(m, gamma)? {
        return Ok(false);
    }
    let trues: Vec<&Atom> = m.iter().filter(|(_, v)| *v == TruthValue::One).map(|(a, _)| a).collect();
    let mut lowered = m.clone();
    for mask in 1u64..(1u64 << trues.len()) {
        for (i, a) in trues.iter().enumerate() {
            let v = if mask >> i & 1 == 1 { TruthValue::Half } else { TruthValue::One };
            lowered.set((*a).clone(), v);
        }
        if is_model(&lowered, gamma)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every total interpretation over `atoms` with values drawn from `values`,
/// in lexicographic order of the sorted atoms.
pub fn all_interpretations(atoms: &Sigma, values: &[TruthValue]) -> Vec<Interp3> {
    let mut out = vec![Interp3::empty()];
    for a in atoms {
        out = out
            .into_iter()
            .flat_map(|m| values.iter().map(move |&v| m.update(a, v)))
            .collect();
    }
    out
}

/// All equilibrium models of `gamma` that are total over `domain`.
pub fn equilibrium_models(gamma: &[Formula], domain: &Sigma) -> Result<BTreeSet<Interp3>> {
    equilibrium_models_capped(gamma, domain, DEFAULT_MAX_DOMAIN)
}

pub fn equilibrium_models_capped(
    gamma: &[Formula],
    domain: &Sigma,
    max_domain: usize,
) -> Result<BTreeSet<Interp3>> {
    if domain.len() > max_domain {
        return Err(Error::CapExceeded {
            what: "equilibrium-model domain",
            size: domain.len(),
            cap: max_domain,
        });
    }
    if let Some(a) = matrix_atoms(gamma).into_iter().find(|a| !domain.contains(a)) {
        return Err(Error::UndefinedAtom(a));
    }
    let mut out = BTreeSet::new();
    for m in all_interpretations(domain, &TruthValue::CLASSICAL) {
        if is_equilibrium_model(&m, gamma)? {
            out.insert(m);
        }
    }
    Ok(out)
}

/// Quantified G3: universal entries take the minimum over `{0, 1/2, 1}`,
/// existential entries the maximum; the matrix is evaluated under G3.
pub fn eval_qg3(m: &Interp3, binder: &Binder, matrix: &[Formula]) -> Result<TruthValue> {
    let Some(((q, x), rest)) = binder.split_first() else {
        return eval_theory(m, matrix, EvalMode::G3);
    };
    let mut values = Vec::with_capacity(3);
    for v in TruthValue::ALL {
        values.push(eval_qg3(&m.update(x, v), &rest, matrix)?);
    }
    let folded = match q {
        Quantifier::Forall => values.into_iter().min(),
        Quantifier::Exists => values.into_iter().max(),
    };
    Ok(folded.expect("three values"))
}
