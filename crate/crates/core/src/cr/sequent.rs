//! Sequent view of a CR derivation: each node annotated with the decision
//! instances it depends on.

use std::fmt;

use super::{check_derivation, CrDerivation, CrRule, NodeId};
use crate::term::{Clause, Literal};
use crate::Violation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    /// Decision instances, tagged with the decision they come from.
    pub antecedent: Vec<(NodeId, Literal)>,
    pub succedent: Clause,
}

impl Sequent {
    pub fn antecedent_literals(&self) -> Vec<Literal> {
        self.antecedent.iter().map(|(_, l)| l.clone()).collect()
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (_, l)) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        if !self.antecedent.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "|- {}", self.succedent)
    }
}

/// One sequent per node. Decisions give `ℓ ⊢ ℓ`, inputs `⊢ c`; inferences
/// collect their premises' antecedents and instantiate them, and clause
/// learning drops the discharged instances.
pub fn to_sequent(d: &CrDerivation) -> Result<Vec<Sequent>, Vec<Violation>> {
    let report = check_derivation(d);
    if !report.is_ok() {
        return Err(report.violations);
    }
    let mut out: Vec<Sequent> = Vec::with_capacity(d.len());
    for (i, node) in d.nodes().iter().enumerate() {
        let antecedent = match &node.rule {
            CrRule::Input => vec![],
            CrRule::Decision { .. } => node.conclusion.iter().map(|l| (i, l.clone())).collect(),
            CrRule::Upr { .. } | CrRule::Conflict { .. } => {
                let step = node.step();
                node.rule
                    .premises()
                    .into_iter()
                    .flat_map(|p| out[p].antecedent.clone())
                    .map(|(k, l)| (k, step.apply_literal(&l)))
                    .collect()
            }
            CrRule::Learn { bottom, .. } => {
                let gone: Vec<NodeId> = node.rule.discharged().collect();
                out[*bottom]
                    .antecedent
                    .iter()
                    .filter(|(k, _)| !gone.contains(k))
                    .map(|(k, l)| (*k, node.renaming.apply_literal(l)))
                    .collect()
            }
        };
        out.push(Sequent { antecedent, succedent: node.conclusion.clone() });
    }
    Ok(out)
}
