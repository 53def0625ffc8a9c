//! The conflict resolution calculus for first-order clauses.
//!
//! Unit-propagating resolution, decision literals and first-order
//! conflict-driven clause learning, together with:
//!
//! * an independent checker for every proof object,
//! * the classical resolution calculus and its translation into CR,
//! * clausal natural deduction and the CR → CND translation,
//! * conflict graphs and their correspondence with single-conflict
//!   CR sub-derivations,
//! * the splitting combinator,
//! * a CDCL-style search engine emitting CR refutations,
//! * TPTP CNF input, certificate formats and DOT export.

pub mod cnd;
pub mod cr;
pub mod graph;
pub mod io;
pub mod resolution;
pub mod samples;
pub mod search;
pub mod term;
pub mod transform;

pub use cr::{CrDerivation, CrError, CrNode, CrRule, NodeId};
pub use term::{Clause, Literal, Substitution, Term, Var};

/// Outcome of a checker: `ok` when `violations` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report<K> {
    pub kind: K,
    pub violations: Vec<Violation>,
}

impl<K> Report<K> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<usize>,
    pub message: String,
}

impl Violation {
    pub fn at(node: usize, message: impl Into<String>) -> Self {
        Violation { node: Some(node), message: message.into() }
    }

    pub fn global(message: impl Into<String>) -> Self {
        Violation { node: None, message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.node {
            Some(n) => write!(f, "node {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}
