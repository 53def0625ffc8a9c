//! CR proofs into CND: tree expansion, the global substitution σ*, and the
//! node-by-node translation.

use std::collections::HashMap;

use super::{CndError, CndId, CndProof};
use crate::cr::{check_derivation, CrDerivation, CrRule, NodeId};
use crate::term::{Literal, Substitution};

/// Node budget of [`expand_to_tree`] used by [`cr_to_cnd`].
pub const DEFAULT_TREE_LIMIT: usize = 200_000;

/// Replays `d` as a tree: every use of a node gets its own copy with fresh
/// variables. Decision copies stay grouped under the CL that discharges the
/// original decision. Fails with `TooLarge` past `limit` nodes.
pub fn expand_to_tree(d: &CrDerivation, limit: usize) -> Result<CrDerivation, CndError> {
    let report = check_derivation(d);
    if !report.is_ok() {
        return Err(CndError::Unchecked(report.violations));
    }
    let Some(sink) = d.sink() else { return Ok(CrDerivation::new()) };
    let mut ex = Expander { src: d, out: CrDerivation::new(), copies: HashMap::new(), limit };
    ex.build(sink)?;
    Ok(ex.out)
}

struct Expander<'a> {
    src: &'a CrDerivation,
    out: CrDerivation,
    copies: HashMap<NodeId, Vec<NodeId>>,
    limit: usize,
}

impl Expander<'_> {
    fn build(&mut self, n: NodeId) -> Result<NodeId, CndError> {
        if self.out.len() >= self.limit {
            return Err(CndError::TooLarge(self.limit));
        }
        let node = self.src.node(n);
        let id = match &node.rule {
            CrRule::Input => self.out.add_input(&node.conclusion),
            CrRule::Decision { .. } => {
                let id = self.out.decide(node.unit().expect("decisions are units"))?;
                self.copies.entry(n).or_default().push(id);
                id
            }
            CrRule::Upr { units, clause, assoc, .. } => {
                let us = units.iter().map(|&u| self.build(u)).collect::<Result<Vec<_>, _>>()?;
                let c = self.build(*clause)?;
                self.out.upr_with(&us, c, assoc)?
            }
            CrRule::Conflict { left, right, .. } => {
                let l = self.build(*left)?;
                let r = self.build(*right)?;
                self.out.conflict(l, r)?
            }
            CrRule::Learn { bottom, discharged, .. } => {
                let b = self.build(*bottom)?;
                let groups = discharged
                    .iter()
                    .map(|g| g.iter().flat_map(|d| self.copies.remove(d).unwrap_or_default()).collect())
                    .collect();
                self.out.learn_grouped(b, groups)?
            }
        };
        Ok(id)
    }
}

/// σ*: every inference substitution of a tree composed in node order, each
/// followed by the renaming of its conclusion. Leaf renamings are skipped
/// since their domains are the source clause's own variables.
///
/// In a tree the domains are pairwise disjoint, so the composition is
/// resolved back to front in one pass.
pub fn global_substitution(tree: &CrDerivation) -> Result<Substitution, CndError> {
    let mut used = vec![false; tree.len()];
    let mut steps: Vec<&Substitution> = Vec::new();
    for node in tree.nodes() {
        for p in node.rule.premises() {
            if std::mem::replace(&mut used[p], true) {
                return Err(CndError::NotTree(p));
            }
        }
        if matches!(node.rule, CrRule::Input | CrRule::Decision { .. }) {
            continue;
        }
        if let Some(s) = node.rule.sigma() {
            steps.push(s);
        }
        steps.push(&node.renaming);
    }
    let mut resolved = Substitution::new();
    for s in steps.into_iter().rev() {
        for (v, t) in s.iter() {
            if resolved.get(v).is_none() {
                let t = resolved.apply_term(t);
                resolved.insert(v.clone(), t);
            }
        }
    }
    Ok(resolved)
}

/// Translates a CR proof into a CND proof of the same clause, following the
/// tree expansion: decisions become labelled assumptions `[ℓσ*]`, inputs are
/// instantiated by ∀E where σ* moves them, UPR becomes a chain of →E, a
/// conflict one ¬E, and CL a block of ¬I/→I, one label per distinct
/// instance of each discharged decision.
///
/// The CND root concludes the tree's sink clause, a variant of `cr`'s sink.
pub fn cr_to_cnd(cr: &CrDerivation) -> Result<CndProof, CndError> {
    let Some(sink) = cr.sink() else { return Ok(CndProof::new()) };
    let open = cr.undischarged(sink);
    if !open.is_empty() {
        return Err(CndError::NotProof(open.iter().copied().collect()));
    }
    let tree = expand_to_tree(cr, DEFAULT_TREE_LIMIT)?;
    let star = global_substitution(&tree)?;
    let inst = |id: NodeId| star.apply_literal(tree.node(id).unit().expect("decisions are units"));

    // labels per decision copy and the ordered discharges per CL
    let mut label_of: HashMap<NodeId, usize> = HashMap::new();
    let mut blocks: HashMap<NodeId, Vec<(Literal, usize)>> = HashMap::new();
    let mut next = 1;
    for (id, node) in tree.nodes().iter().enumerate() {
        if let CrRule::Learn { discharged, .. } = &node.rule {
            let mut block = Vec::new();
            for group in discharged {
                let mut seen: Vec<(Literal, usize)> = Vec::new();
                for &d in group {
                    let l = inst(d);
                    let label = match seen.iter().find(|(x, _)| *x == l) {
                        Some(&(_, label)) => label,
                        None => {
                            seen.push((l, next));
                            next += 1;
                            next - 1
                        }
                    };
                    label_of.insert(d, label);
                }
                block.extend(seen);
            }
            blocks.insert(id, block);
        }
    }

    let mut out = CndProof::new();
    let mut map: Vec<CndId> = Vec::with_capacity(tree.len());
    for (id, node) in tree.nodes().iter().enumerate() {
        let image = match &node.rule {
            CrRule::Input => {
                let leaf = out.input(&node.conclusion);
                let s = star.restrict(&node.conclusion.vars());
                if s.apply_clause(&node.conclusion) == node.conclusion {
                    leaf
                } else {
                    out.all_e(leaf, &s)?
                }
            }
            CrRule::Decision { .. } => out.assume(&inst(id), label_of.get(&id).copied())?,
            CrRule::Upr { units, clause, .. } => {
                let mut major = map[*clause];
                for &u in units {
                    major = out.imp_e(map[u], major)?;
                }
                major
            }
            CrRule::Conflict { left, right, .. } => out.neg_e(map[*left], map[*right])?,
            CrRule::Learn { bottom, .. } => {
                let mut body = map[*bottom];
                for (k, (lit, label)) in blocks[&id].iter().rev().enumerate() {
                    body = if k == 0 { out.neg_i(body, lit, *label)? } else { out.imp_i(body, lit, *label)? };
                }
                body
            }
        };
        map.push(image);
    }
    Ok(out)
}
