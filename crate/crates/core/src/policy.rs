//! Policy trees over a binder.
//!
//! A QBF-policy branches over `{0, 1}` at universal nodes and commits to a
//! value in `{0, 1}` at existential nodes; a QG3-policy does the same over
//! `{0, 1/2, 1}`. Both are represented by [`Policy`]; the [`Arity`] passed to
//! [`conforms`] and [`enumerate_policies`] says which family is meant.
//!
//! Trees store the variable at every node even though the binder determines
//! it, so serialized policies are self-describing.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::formula::{Atom, Binder, Formula, Quantifier};
use crate::semantics::{eval_theory, EvalMode, Interp3, TruthValue};

/// Default cap on binder length for policy enumeration.
pub const DEFAULT_MAX_ENUMERATION: usize = 8;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Policy {
    /// The empty policy.
    Leaf,
    Exists {
        var: Atom,
        value: TruthValue,
        sub: Box<Policy>,
    },
    /// Branches are listed in increasing value order.
    Forall {
        var: Atom,
        branches: Vec<(TruthValue, Policy)>,
    },
}

/// Which policy family: QBF-policies (`{0,1}`) or QG3-policies (`{0,1/2,1}`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Arity {
    Binary,
    Ternary,
}

impl Arity {
    pub fn values(self) -> &'static [TruthValue] {
        match self {
            Arity::Binary => &TruthValue::CLASSICAL,
            Arity::Ternary => &TruthValue::ALL,
        }
    }
}

impl Policy {
    pub fn exists(var: &str, value: TruthValue, sub: Policy) -> Policy {
        Policy::Exists {
            var: Atom::new(var).expect("invalid atom name"),
            value,
            sub: Box::new(sub),
        }
    }

    /// Binary universal node.
    pub fn forall(var: &str, on_zero: Policy, on_one: Policy) -> Policy {
        Policy::Forall {
            var: Atom::new(var).expect("invalid atom name"),
            branches: vec![(TruthValue::Zero, on_zero), (TruthValue::One, on_one)],
        }
    }

    /// Ternary universal node.
    pub fn forall3(var: &str, on_zero: Policy, on_half: Policy, on_one: Policy) -> Policy {
        Policy::Forall {
            var: Atom::new(var).expect("invalid atom name"),
            branches: vec![
                (TruthValue::Zero, on_zero),
                (TruthValue::Half, on_half),
                (TruthValue::One, on_one),
            ],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Policy::Leaf)
    }

    pub fn node_count(&self) -> usize {
        match self {
            Policy::Leaf => 1,
            Policy::Exists { sub, .. } => 1 + sub.node_count(),
            Policy::Forall { branches, .. } => 1 + branches.iter().map(|(_, p)| p.node_count()).sum::<usize>(),
        }
    }
}

/// Compact one-line form: `x:1;z:0;lambda`, `forall x(z:0;lambda, z:1;lambda)`.
impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Leaf => f.write_str("lambda"),
            Policy::Exists { var, value, sub } => write!(f, "{var}:{value};{sub}"),
            Policy::Forall { var, branches } => {
                write!(f, "forall {var}(")?;
                for (i, (_, p)) in branches.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Whether `pi` belongs to the policy family of `arity` for `binder`.
pub fn conforms(pi: &Policy, binder: &Binder, arity: Arity) -> bool {
    conforms_at(pi, binder.entries(), arity)
}

fn conforms_at(pi: &Policy, rest: &[(Quantifier, Atom)], arity: Arity) -> bool {
    match (pi, rest.split_first()) {
        (Policy::Leaf, None) => true,
        (Policy::Exists { var, value, sub }, Some(((Quantifier::Exists, x), tail))) => {
            var == x && arity.values().contains(value) && conforms_at(sub, tail, arity)
        }
        (Policy::Forall { var, branches }, Some(((Quantifier::Forall, x), tail))) => {
            var == x
                && branches.iter().map(|(v, _)| *v).eq(arity.values().iter().copied())
                && branches.iter().all(|(_, p)| conforms_at(p, tail, arity))
        }
        _ => false,
    }
}

fn require_conforming(pi: &Policy, binder: &Binder, arity: Arity) -> Result<()> {
    if conforms(pi, binder, arity) {
        Ok(())
    } else {
        Err(Error::NonConforming(binder.to_string()))
    }
}

/// A partial interpretation together with the policy still to be played.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration<'a> {
    pub interp: Interp3,
    pub policy: &'a Policy,
}

impl<'a> Configuration<'a> {
    pub fn new(interp: Interp3, policy: &'a Policy) -> Configuration<'a> {
        Configuration { interp, policy }
    }

    /// Starts from the empty interpretation.
    pub fn initial(policy: &'a Policy) -> Configuration<'a> {
        Configuration::new(Interp3::empty(), policy)
    }

    pub fn sat_classical(&self, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
        sat_classical(&self.interp, self.policy, binder, matrix)
    }

    pub fn sat_qg3(&self, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
        sat_qg3(&self.interp, self.policy, binder, matrix)
    }

    pub fn sat_mixed(&self, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
        sat_mixed(&self.interp, self.policy, binder, matrix)
    }

    pub fn members(&self, binder: &Binder) -> BTreeSet<Interp3> {
        members(self.policy, binder, &self.interp)
    }
}

/// Classical satisfaction of a QBF-policy from a crisp interpretation.
pub fn sat_classical(m: &Interp3, pi: &Policy, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
    require_conforming(pi, binder, Arity::Binary)?;
    descend(m, pi, EvalMode::Classical, matrix)
}

/// Satisfaction of a QG3-policy: three universal branches, G3 leaf test.
pub fn sat_qg3(m: &Interp3, pi: &Policy, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
    require_conforming(pi, binder, Arity::Ternary)?;
    descend(m, pi, EvalMode::G3, matrix)
}

/// A QBF-policy played from a possibly non-crisp interpretation: branching
/// stays over `{0, 1}` but the leaf is tested under G3 with the full `m`.
pub fn sat_mixed(m: &Interp3, pi: &Policy, binder: &Binder, matrix: &[Formula]) -> Result<bool> {
    require_conforming(pi, binder, Arity::Binary)?;
    descend(m, pi, EvalMode::G3, matrix)
}

// Conformance is checked by the callers, so branch values already match the family.
fn descend(m: &Interp3, pi: &Policy, mode: EvalMode, matrix: &[Formula]) -> Result<bool> {
    match pi {
        Policy::Leaf => Ok(eval_theory(m, matrix, mode)? == TruthValue::One),
        Policy::Exists { var, value, sub } => descend(&m.update(var, *value), sub, mode, matrix),
        Policy::Forall { var, branches } => {
            for (v, p) in branches {
                if !descend(&m.update(var, *v), p, mode, matrix)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The interpretations reachable through `pi`: `m` extended along every
/// root-to-leaf path with the values the path fixes.
pub fn members(pi: &Policy, binder: &Binder, m: &Interp3) -> BTreeSet<Interp3> {
    debug_assert!(
        conforms(pi, binder, Arity::Binary) || conforms(pi, binder, Arity::Ternary),
        "members() on a policy that does not match {binder}"
    );
    let mut out = BTreeSet::new();
    collect_members(pi, m.clone(), &mut out);
    out
}

fn collect_members(pi: &Policy, m: Interp3, out: &mut BTreeSet<Interp3>) {
    match pi {
        Policy::Leaf => {
            out.insert(m);
        }
        Policy::Exists { var, value, sub } => collect_members(sub, m.update(var, *value), out),
        Policy::Forall { var, branches } => {
            for (v, p) in branches {
                collect_members(p, m.update(var, *v), out);
            }
        }
    }
}

/// Whether `m` follows `pi`: existential nodes must match `m`'s value and
/// universal nodes continue along the branch `m` selects. Atoms outside the
/// binder are not inspected.
pub fn contains(pi: &Policy, m: &Interp3) -> bool {
    match pi {
        Policy::Leaf => true,
        Policy::Exists { var, value, sub } => m.get(var) == Some(*value) && contains(sub, m),
        Policy::Forall { var, branches } => match m.get(var) {
            Some(v) => branches
                .iter()
                .find(|(w, _)| *w == v)
                .is_some_and(|(_, p)| contains(p, m)),
            None => false,
        },
    }
}

/// Number of policies of the given family for `binder`, or `None` on overflow.
pub fn count_policies(binder: &Binder, arity: Arity) -> Option<u128> {
    let k = arity.values().len() as u32;
    let mut count: u128 = 1;
    for (q, _) in binder.entries().iter().rev() {
        count = match q {
            Quantifier::Exists => count.checked_mul(k as u128)?,
            Quantifier::Forall => count.checked_pow(k)?,
        };
    }
    Some(count)
}

/// Every policy of the family for `binder`, in increasing [`Ord`] order.
///
/// Inner sub-universes are materialized; the outermost level is produced lazily.
pub fn enumerate_policies(binder: &Binder, arity: Arity) -> Result<PolicyIter> {
    enumerate_policies_capped(binder, arity, DEFAULT_MAX_ENUMERATION)
}

pub fn enumerate_policies_capped(binder: &Binder, arity: Arity, cap: usize) -> Result<PolicyIter> {
    if binder.len() > cap {
        return Err(Error::CapExceeded {
            what: "policy enumeration binder",
            size: binder.len(),
            cap,
        });
    }
    let Some(((q, x), rest)) = binder.split_first() else {
        return Ok(PolicyIter(IterState::Single(Some(Policy::Leaf))));
    };
    let subs = universe(&rest, arity);
    let slots = match q {
        Quantifier::Exists => 1,
        Quantifier::Forall => arity.values().len(),
    };
    Ok(PolicyIter(IterState::Product {
        var: x.clone(),
        quantifier: q,
        values: arity.values(),
        subs,
        digits: vec![0; slots],
        exists_value: 0,
        done: false,
    }))
}

fn universe(binder: &Binder, arity: Arity) -> Vec<Policy> {
    let Some(((q, x), rest)) = binder.split_first() else {
        return vec![Policy::Leaf];
    };
    let subs = universe(&rest, arity);
    let mut out = Vec::new();
    match q {
        Quantifier::Exists => {
            for &v in arity.values() {
                for p in &subs {
                    out.push(Policy::Exists {
                        var: x.clone(),
                        value: v,
                        sub: Box::new(p.clone()),
                    });
                }
            }
        }
        Quantifier::Forall => {
            let mut combos: Vec<Vec<(TruthValue, Policy)>> = vec![Vec::new()];
            for &v in arity.values() {
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        subs.iter().map(move |p| {
                            let mut next = prefix.clone();
                            next.push((v, p.clone()));
                            next
                        })
                    })
                    .collect();
            }
            out.extend(combos.into_iter().map(|branches| Policy::Forall {
                var: x.clone(),
                branches,
            }));
        }
    }
    out
}

/// Lazy iterator over a policy universe; see [`enumerate_policies`].
#[derive(Debug)]
pub struct PolicyIter(IterState);

#[derive(Debug)]
enum IterState {
    Single(Option<Policy>),
    Product {
        var: Atom,
        quantifier: Quantifier,
        values: &'static [TruthValue],
        subs: Vec<Policy>,
        digits: Vec<usize>,
        exists_value: usize,
        done: bool,
    },
}

impl Iterator for PolicyIter {
    type Item = Policy;

    fn next(&mut self) -> Option<Policy> {
        let IterState::Product {
            var,
            quantifier,
            values,
            subs,
            digits,
            exists_value,
            done,
        } = &mut self.0
        else {
            let IterState::Single(p) = &mut self.0 else { unreachable!() };
            return p.take();
        };
        if *done {
            return None;
        }
        let item = match quantifier {
            Quantifier::Exists => Policy::Exists {
                var: var.clone(),
                value: values[*exists_value],
                sub: Box::new(subs[digits[0]].clone()),
            },
            Quantifier::Forall => Policy::Forall {
                var: var.clone(),
                branches: values
                    .iter()
                    .zip(digits.iter())
                    .map(|(&v, &d)| (v, subs[d].clone()))
                    .collect(),
            },
        };
        // odometer step, last digit fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                if *quantifier == Quantifier::Exists && *exists_value + 1 < values.len() {
                    *exists_value += 1;
                } else {
                    *done = true;
                }
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < subs.len() {
                break;
            }
            digits[i] = 0;
        }
        Some(item)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderFormat {
    Text,
    Json,
    Dot,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<RenderFormat, String> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "json" => Ok(RenderFormat::Json),
            "dot" => Ok(RenderFormat::Dot),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

pub fn render(pi: &Policy, format: RenderFormat) -> String {
    match format {
        RenderFormat::Text => render_text(pi),
        RenderFormat::Json => serde_json::to_string_pretty(&to_json(pi)).expect("json"),
        RenderFormat::Dot => render_dot(pi, "policy"),
    }
}

/// Indented tree: nodes show the variable, edges show the value taken.
///
/// ```text
/// x
///   -0-> z
///     -0-> lambda
///   -1-> z
///     -1-> lambda
/// ```
pub fn render_text(pi: &Policy) -> String {
    let mut out = String::new();
    text_node(pi, 0, None, &mut out);
    out
}

fn text_node(pi: &Policy, depth: usize, edge: Option<TruthValue>, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    if let Some(v) = edge {
        out.push_str(&format!("-{v}-> "));
    }
    match pi {
        Policy::Leaf => out.push_str("lambda\n"),
        Policy::Exists { var, value, sub } => {
            out.push_str(&format!("{var}\n"));
            text_node(sub, depth + 1, Some(*value), out);
        }
        Policy::Forall { var, branches } => {
            out.push_str(&format!("{var}\n"));
            for (v, p) in branches {
                text_node(p, depth + 1, Some(*v), out);
            }
        }
    }
}

/// Graphviz digraph; node ids are preorder indices.
pub fn render_dot(pi: &Policy, name: &str) -> String {
    let mut nodes = String::new();
    let mut edges = String::new();
    let mut next = 0usize;
    dot_node(pi, &mut next, &mut nodes, &mut edges);
    format!("digraph {name} {{\n{nodes}{edges}}}\n")
}

fn dot_node(pi: &Policy, next: &mut usize, nodes: &mut String, edges: &mut String) {
    let id = *next;
    *next += 1;
    match pi {
        Policy::Leaf => nodes.push_str(&format!("  n{id} [label=\"lambda\", shape=plaintext];\n")),
        Policy::Exists { var, value, sub } => {
            nodes.push_str(&format!("  n{id} [label=\"{var}\", shape=box];\n"));
            edges.push_str(&format!("  n{id} -> n{} [label=\"{value}\"];\n", *next));
            dot_node(sub, next, nodes, edges);
        }
        Policy::Forall { var, branches } => {
            nodes.push_str(&format!("  n{id} [label=\"{var}\", shape=ellipse];\n"));
            for (v, p) in branches {
                edges.push_str(&format!("  n{id} -> n{} [label=\"{v}\"];\n", *next));
                dot_node(p, next, nodes, edges);
            }
        }
    }
}

pub fn to_json(pi: &Policy) -> Value {
    match pi {
        Policy::Leaf => json!({ "kind": "leaf" }),
        Policy::Exists { var, value, sub } => json!({
            "kind": "exists",
            "var": var.name(),
            "value": value.as_str(),
            "sub": to_json(sub),
        }),
        Policy::Forall { var, branches } => {
            let mut map = Map::new();
            for (v, p) in branches {
                map.insert(v.as_str().to_string(), to_json(p));
            }
            json!({ "kind": "forall", "var": var.name(), "branches": map })
        }
    }
}

pub fn from_json(value: &Value) -> Result<Policy> {
    let bad = |msg: &str| Error::PolicyJson(msg.to_string());
    let kind = value.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing `kind`"))?;
    let var = || -> Result<Atom> {
        let name = value.get("var").and_then(Value::as_str).ok_or_else(|| bad("missing `var`"))?;
        Atom::new(name)
    };
    match kind {
        "leaf" => Ok(Policy::Leaf),
        "exists" => {
            let v = value.get("value").and_then(Value::as_str).ok_or_else(|| bad("missing `value`"))?;
            let sub = value.get("sub").ok_or_else(|| bad("missing `sub`"))?;
            Ok(Policy::Exists {
                var: var()?,
                value: v.parse()?,
                sub: Box::new(from_json(sub)?),
            })
        }
        "forall" => {
            let map = value
                .get("branches")
                .and_then(Value::as_object)
                .ok_or_else(|| bad("missing `branches`"))?;
            let mut branches = Vec::new();
            for (k, p) in map {
                branches.push((k.parse::<TruthValue>()?, from_json(p)?));
            }
            branches.sort_by_key(|(v, _)| *v);
            Ok(Policy::Forall { var: var()?, branches })
        }
        other => Err(bad(&format!("unknown kind `{other}`"))),
    }
}
