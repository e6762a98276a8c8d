//! Quantified answer set programming under two semantics.
//!
//! Both semantics walk the binder and augment the theory: a negative choice
//! for `x` adds `~x`. They differ on the positive choice, which adds `~~x`
//! under [`SemanticsKind::Fandinno`] and the fact `x` under
//! [`SemanticsKind::Stephan`]. A fully augmented theory is satisfiable when
//! it has an equilibrium model.
//!
//! Policies are read as game trees: an existential node picks the choice,
//! a universal node must survive both.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, QuantifiedTheory, Quantifier};
use crate::policy::{to_json, Policy, DEFAULT_MAX_ENUMERATION};
use crate::semantics::{equilibrium_models_capped, Sigma, TruthValue, DEFAULT_MAX_DOMAIN};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SemanticsKind {
    /// Truth forced with `~~x`.
    #[default]
    Fandinno,
    /// Truth forced with the fact `x`.
    Stephan,
}

impl SemanticsKind {
    /// The formula added to the theory when `x` is chosen with `value`.
    pub fn augmentation(self, x: &Atom, value: TruthValue) -> Formula {
        let var = Formula::Var(x.clone());
        match (value, self) {
            (TruthValue::Zero, _) => Formula::neg(var),
            (_, SemanticsKind::Fandinno) => Formula::neg(Formula::neg(var)),
            (_, SemanticsKind::Stephan) => var,
        }
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsKind::Fandinno => "fandinno",
            SemanticsKind::Stephan => "stephan",
        })
    }
}

impl std::str::FromStr for SemanticsKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<SemanticsKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "fandinno" => Ok(SemanticsKind::Fandinno),
            "stephan" | "stéphan" => Ok(SemanticsKind::Stephan),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

/// Size limits for the QASP procedures.
#[derive(Clone, Copy, Debug)]
pub struct QaspLimits {
    pub max_binder: usize,
    pub max_domain: usize,
}

impl Default for QaspLimits {
    fn default() -> QaspLimits {
        QaspLimits {
            max_binder: DEFAULT_MAX_ENUMERATION,
            max_domain: DEFAULT_MAX_DOMAIN,
        }
    }
}

struct Game<'a> {
    binder: &'a [(Quantifier, Atom)],
    domain: Sigma,
    kind: SemanticsKind,
    max_domain: usize,
}

impl<'a> Game<'a> {
    fn new(theory: &'a QuantifiedTheory, kind: SemanticsKind, limits: QaspLimits) -> Result<Game<'a>> {
        if theory.binder.len() > limits.max_binder {
            return Err(Error::CapExceeded {
                what: "QASP binder",
                size: theory.binder.len(),
                cap: limits.max_binder,
            });
        }
        let domain = theory.atoms();
        if domain.len() > limits.max_domain {
            return Err(Error::CapExceeded {
                what: "equilibrium-model domain",
                size: domain.len(),
                cap: limits.max_domain,
            });
        }
        Ok(Game {
            binder: theory.binder.entries(),
            domain,
            kind,
            max_domain: limits.max_domain,
        })
    }

    fn has_answer_set(&self, gamma: &[Formula]) -> Result<bool> {
        Ok(!equilibrium_models_capped(gamma, &self.domain, self.max_domain)?.is_empty())
    }

    fn satisfiable(&self, depth: usize, gamma: &mut Vec<Formula>) -> Result<bool> {
        let Some((q, x)) = self.binder.get(depth) else {
            return self.has_answer_set(gamma);
        };
        let mut outcomes = TruthValue::CLASSICAL.iter().map(|&v| {
            gamma.push(self.kind.augmentation(x, v));
            let r = self.satisfiable(depth + 1, gamma);
            gamma.pop();
            r
        });
        // short-circuit: any for exists, all for forall
        match q {
            Quantifier::Exists => {
                for r in outcomes.by_ref() {
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Quantifier::Forall => {
                for r in outcomes.by_ref() {
                    if !r? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn accepted(&self, depth: usize, gamma: &mut Vec<Formula>) -> Result<Vec<Policy>> {
        let Some((q, x)) = self.binder.get(depth) else {
            return Ok(if self.has_answer_set(gamma)? {
                vec![Policy::Leaf]
            } else {
                Vec::new()
            });
        };
        let mut per_value = Vec::with_capacity(2);
        for v in TruthValue::CLASSICAL {
            gamma.push(self.kind.augmentation(x, v));
            let subs = self.accepted(depth + 1, gamma);
            gamma.pop();
            per_value.push((v, subs?));
        }
        let mut out = Vec::new();
        match q {
            Quantifier::Exists => {
                for (v, subs) in per_value {
                    out.extend(subs.into_iter().map(|p| Policy::Exists {
                        var: x.clone(),
                        value: v,
                        sub: Box::new(p),
                    }));
                }
            }
            Quantifier::Forall => {
                let (zero, one) = (&per_value[0].1, &per_value[1].1);
                for p0 in zero {
                    for p1 in one {
                        out.push(Policy::Forall {
                            var: x.clone(),
                            branches: vec![(TruthValue::Zero, p0.clone()), (TruthValue::One, p1.clone())],
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn sat_qasp(theory: &QuantifiedTheory, kind: SemanticsKind) -> Result<bool> {
    sat_qasp_with(theory, kind, QaspLimits::default())
}

pub fn sat_qasp_with(theory: &QuantifiedTheory, kind: SemanticsKind, limits: QaspLimits) -> Result<bool> {
    let game = Game::new(theory, kind, limits)?;
    game.satisfiable(0, &mut theory.matrix.clone())
}

/// Every QBF-policy whose prescribed choices lead, on every branch, to an
/// augmented theory with an equilibrium model.
pub fn accepted_policies(theory: &QuantifiedTheory, kind: SemanticsKind) -> Result<BTreeSet<Policy>> {
    accepted_policies_with(theory, kind, QaspLimits::default())
}

pub fn accepted_policies_with(
    theory: &QuantifiedTheory,
    kind: SemanticsKind,
    limits: QaspLimits,
) -> Result<BTreeSet<Policy>> {
    let game = Game::new(theory, kind, limits)?;
    Ok(game.accepted(0, &mut theory.matrix.clone())?.into_iter().collect())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemanticsOutcome {
    pub sat: bool,
    pub policies: BTreeSet<Policy>,
}

/// Both semantics side by side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemanticsReport {
    pub fandinno: SemanticsOutcome,
    pub stephan: SemanticsOutcome,
}

impl SemanticsReport {
    pub fn only_stephan(&self) -> BTreeSet<Policy> {
        self.stephan.policies.difference(&self.fandinno.policies).cloned().collect()
    }

    pub fn only_fandinno(&self) -> BTreeSet<Policy> {
        self.fandinno.policies.difference(&self.stephan.policies).cloned().collect()
    }

    pub fn identical(&self) -> bool {
        self.fandinno == self.stephan
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Side {
            sat: bool,
            policies: Vec<serde_json::Value>,
        }
        #[derive(Serialize)]
        struct Doc {
            fandinno: Side,
            stephan: Side,
            only_stephan: Vec<serde_json::Value>,
            only_fandinno: Vec<serde_json::Value>,
        }
        let side = |o: &SemanticsOutcome| Side {
            sat: o.sat,
            policies: o.policies.iter().map(to_json).collect(),
        };
        let doc = Doc {
            fandinno: side(&self.fandinno),
            stephan: side(&self.stephan),
            only_stephan: self.only_stephan().iter().map(to_json).collect(),
            only_fandinno: self.only_fandinno().iter().map(to_json).collect(),
        };
        serde_json::to_value(doc).expect("report serializes")
    }
}

pub fn compare_semantics(theory: &QuantifiedTheory) -> Result<SemanticsReport> {
    compare_semantics_with(theory, QaspLimits::default())
}

pub fn compare_semantics_with(theory: &QuantifiedTheory, limits: QaspLimits) -> Result<SemanticsReport> {
    let outcome = |kind| -> Result<SemanticsOutcome> {
        Ok(SemanticsOutcome {
            sat: sat_qasp_with(theory, kind, limits)?,
            policies: accepted_policies_with(theory, kind, limits)?,
        })
    };
    Ok(SemanticsReport {
        fandinno: outcome(SemanticsKind::Fandinno)?,
        stephan: outcome(SemanticsKind::Stephan)?,
    })
}
