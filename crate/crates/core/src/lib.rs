//! Quantified equilibrium logic over prenex propositional theories.
//!
//! * [`formula`]: syntax, parsing and printing of quantified theories.
//! * [`semantics`]: G3 evaluation, crisp projection, truth orderings,
//!   equilibrium models and quantified G3.
//! * [`policy`]: QBF- and QG3-policies, satisfaction relations, enumeration
//!   and rendering.
//! * [`qasp`]: satisfiability and accepted policies under the two QASP
//!   semantics (`~~x` versus `x` for forcing truth).
//! * [`qem`]: quantifier elimination computing equilibrium policies.
//! * [`oracle`]: brute-force equilibrium policies, kept independent of [`qem`].

pub mod error;
pub mod formula;
pub mod oracle;
pub mod policy;
pub mod qasp;
pub mod qem;
pub mod semantics;

pub use error::{Error, Result};
pub use formula::{parse_theory, Atom, Binder, Formula, QuantifiedTheory, Quantifier};
pub use policy::{Arity, Policy};
pub use semantics::{Interp3, TruthValue};
