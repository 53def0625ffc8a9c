//! Factoring as a derived rule: a few decisions, one unit-propagating
//! resolution, one conflict and one clause learning.

use super::{CrDerivation, CrError, NodeId};
use crate::term::{mgu, Literal};

impl CrDerivation {
    /// Factors the literals at `group` in the conclusion of `premise`.
    ///
    /// With `ℓ` the merged literal and `ℓ'_1 … ℓ'_m` the other literals, the
    /// result concludes `(ℓ ∨ ℓ'_1 ∨ … ∨ ℓ'_m)σ`. Every node of the expansion
    /// is an ordinary CR node; the returned id is the final CL node.
    pub fn factor(&mut self, premise: NodeId, group: &[usize]) -> Result<NodeId, CrError> {
        let c = self.get(premise)?.conclusion.clone();
        let lits = c.literals();
        let mut sorted = group.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 2 || sorted.len() != group.len() {
            return Err(CrError::NotFactorable(format!("need at least two distinct positions, got {group:?}")));
        }
        if let Some(&p) = group.iter().find(|&&p| p >= lits.len()) {
            return Err(CrError::NotFactorable(format!("position {p} out of range")));
        }
        let first = &lits[group[0]];
        let pairs: Vec<(Literal, Literal)> = group[1..].iter().map(|&p| (first.clone(), lits[p].clone())).collect();
        let sigma = mgu(&pairs)?;
        let rest: Vec<usize> = (0..lits.len()).filter(|p| !group.contains(p)).collect();

        let psi = self.decide(&sigma.apply_literal(first).flipped())?;
        let n = group.len();
        match rest.split_last() {
            None => {
                let units = vec![psi; n - 1];
                let upr = self.upr_with(&units, premise, &group[..n - 1])?;
                let bottom = self.conflict(upr, psi)?;
                self.learn(bottom, &[psi])
            }
            Some((&last, others)) => {
                let mut units = vec![psi; n];
                let mut assoc = group.to_vec();
                let mut decided = vec![psi];
                for &p in others {
                    let d = self.decide(&lits[p].flipped())?;
                    units.push(d);
                    assoc.push(p);
                    decided.push(d);
                }
                let upr = self.upr_with(&units, premise, &assoc)?;
                let closing = self.decide(&sigma.apply_literal(&lits[last]).flipped())?;
                decided.push(closing);
                let bottom = self.conflict(upr, closing)?;
                self.learn(bottom, &decided)
            }
        }
    }
}
