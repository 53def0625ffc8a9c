//! The CR proof DAG: input clauses, decisions, unit-propagating resolution,
//! conflicts and conflict-driven clause learning.
//!
//! Nodes are stored in creation order, so premises always precede their
//! conclusions. Every conclusion is renamed apart from all earlier nodes; the
//! unifier stored on a node is the one computed before renaming and the
//! renaming itself is stored next to it.

mod check;
mod factoring;
mod sequent;

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::term::{self, mgu, rename_apart, unify_atoms, Clause, FreshVars, Literal, Substitution, Var};

pub use check::{check_derivation, check_inputs, CrKind, CrReport};
pub use sequent::{to_sequent, Sequent};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrRule {
    Input,
    /// An assumption. `discharged_by` names the CL node that discharges it.
    Decision {
        discharged_by: Option<NodeId>,
    },
    /// `assoc[k]` is the position in the clause premise resolved against `units[k]`;
    /// the single remaining position is the propagated literal.
    Upr {
        units: Vec<NodeId>,
        clause: NodeId,
        assoc: Vec<usize>,
        sigma: Substitution,
    },
    Conflict {
        left: NodeId,
        right: NodeId,
        sigma: Substitution,
    },
    /// Clause learning. Each group lists decisions whose instances are merged
    /// together; ordinary learning uses singleton groups. Copies of one
    /// decision made by tree expansion share a group.
    Learn {
        bottom: NodeId,
        discharged: Vec<Vec<NodeId>>,
        index: usize,
    },
}

impl CrRule {
    /// Premises in the fixed path-enumeration order.
    pub fn premises(&self) -> Vec<NodeId> {
        match self {
            CrRule::Input | CrRule::Decision { .. } => vec![],
            CrRule::Upr { units, clause, .. } => units.iter().copied().chain([*clause]).collect(),
            CrRule::Conflict { left, right, .. } => vec![*left, *right],
            CrRule::Learn { bottom, .. } => vec![*bottom],
        }
    }

    pub fn sigma(&self) -> Option<&Substitution> {
        match self {
            CrRule::Upr { sigma, .. } | CrRule::Conflict { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CrRule::Input => "input",
            CrRule::Decision { .. } => "decision",
            CrRule::Upr { .. } => "upr",
            CrRule::Conflict { .. } => "conflict",
            CrRule::Learn { .. } => "cl",
        }
    }

    pub fn discharged(&self) -> impl Iterator<Item = NodeId> + '_ {
        let groups: &[Vec<NodeId>] = match self {
            CrRule::Learn { discharged, .. } => discharged,
            _ => &[],
        };
        groups.iter().flatten().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrNode {
    pub rule: CrRule,
    pub conclusion: Clause,
    /// Renaming applied to the computed conclusion to keep it apart.
    pub renaming: Substitution,
    open: BTreeSet<NodeId>,
}

impl CrNode {
    pub fn unit(&self) -> Option<&Literal> {
        self.conclusion.as_unit()
    }

    /// Undischarged decisions above (or at) this node.
    pub fn open(&self) -> &BTreeSet<NodeId> {
        &self.open
    }

    /// The substitution a path picks up when it passes through this node.
    pub fn step(&self) -> Substitution {
        match self.rule.sigma() {
            Some(s) => s.compose(&self.renaming),
            None => self.renaming.clone(),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CrError {
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("`{0}` cannot be decided")]
    NoDual(String),
    #[error("node {0} does not conclude a unit clause")]
    NotUnit(NodeId),
    #[error("nodes {0} and {1} have the same polarity")]
    SamePolarity(NodeId, NodeId),
    #[error("{0}")]
    NotUnifiable(#[from] term::NotUnifiable),
    #[error("clause premise has {found} literals, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("no association of clause literals to unit premises")]
    NoAssociation,
    #[error("unit-propagating resolution needs at least one unit premise")]
    NoUnits,
    #[error("node {0} does not conclude the empty clause")]
    NotBottom(NodeId),
    #[error("node {0} is not a decision")]
    NotDecision(NodeId),
    #[error("decision {0} is already discharged")]
    AlreadyDischarged(NodeId),
    #[error("decision {decision} is not an ancestor of node {node}")]
    NotAncestor { decision: NodeId, node: NodeId },
    #[error("cannot factor: {0}")]
    NotFactorable(String),
}

/// One path from a decision down to a ⊥ node and its composed substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSubstitution {
    pub decision: NodeId,
    pub composition: Substitution,
}

#[derive(Clone, Debug, Default)]
pub struct CrDerivation {
    nodes: Vec<CrNode>,
    vars: BTreeSet<Var>,
    fresh: FreshVars,
    learned: usize,
}

impl CrDerivation {
    pub fn new() -> Self {
        CrDerivation::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CrNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &CrNode {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Result<&CrNode, CrError> {
        self.nodes.get(id).ok_or(CrError::UnknownNode(id))
    }

    pub fn conclusion(&self, id: NodeId) -> &Clause {
        &self.nodes[id].conclusion
    }

    /// The last node.
    pub fn sink(&self) -> Option<NodeId> {
        self.nodes.len().checked_sub(1)
    }

    pub fn undischarged(&self, id: NodeId) -> &BTreeSet<NodeId> {
        &self.nodes[id].open
    }

    pub fn is_proof(&self) -> bool {
        self.sink().is_some_and(|s| self.nodes[s].open.is_empty())
    }

    pub fn is_refutation(&self) -> bool {
        self.is_proof() && self.sink().is_some_and(|s| self.nodes[s].conclusion.is_bottom())
    }

    pub fn inputs(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_where(|r| matches!(r, CrRule::Input))
    }

    pub fn decisions(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_where(|r| matches!(r, CrRule::Decision { .. }))
    }

    pub fn count(&self, name: &str) -> usize {
        self.nodes.iter().filter(|n| n.rule.name() == name).count()
    }

    fn ids_where(&self, f: impl Fn(&CrRule) -> bool + 'static) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(move |(_, n)| f(&n.rule)).map(|(i, _)| i)
    }

    /// All nodes from which `id` is reachable, including `id`.
    pub fn ancestors(&self, id: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(self.nodes[n].rule.premises());
            }
        }
        seen
    }

    /// For each node, the nodes that use it as a premise (with multiplicity).
    pub fn children(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for p in n.rule.premises() {
                out[p].push(i);
            }
        }
        out
    }

    fn finish(&mut self, rule: CrRule, pre: Clause) -> NodeId {
        let (conclusion, renaming) = rename_apart(&pre, &self.vars, &mut self.fresh);
        self.vars.extend(conclusion.vars());
        let open = compute_open(&self.nodes, &rule, self.nodes.len());
        self.nodes.push(CrNode { rule, conclusion, renaming, open });
        self.nodes.len() - 1
    }

    pub fn add_input(&mut self, c: &Clause) -> NodeId {
        self.finish(CrRule::Input, c.clone())
    }

    pub fn decide(&mut self, l: &Literal) -> Result<NodeId, CrError> {
        if l.is_constant_truth() {
            return Err(CrError::NoDual(l.to_string()));
        }
        Ok(self.finish(CrRule::Decision { discharged_by: None }, Clause::unit(l.clone())))
    }

    fn unit_of(&self, id: NodeId) -> Result<&Literal, CrError> {
        self.get(id)?.unit().ok_or(CrError::NotUnit(id))
    }

    /// Unit-propagating resolution, searching for the first association of
    /// clause literals to units (in unit order, then clause order) that unifies.
    pub fn upr(&mut self, units: &[NodeId], clause: NodeId) -> Result<NodeId, CrError> {
        let assoc = self.find_association(units, clause)?;
        self.upr_with(units, clause, &assoc)
    }

    fn find_association(&self, units: &[NodeId], clause: NodeId) -> Result<Vec<usize>, CrError> {
        if units.is_empty() {
            return Err(CrError::NoUnits);
        }
        let lits: Vec<Literal> = units.iter().map(|&u| self.unit_of(u).cloned()).collect::<Result<_, _>>()?;
        let c = &self.get(clause)?.conclusion;
        if c.len() != units.len() + 1 {
            return Err(CrError::ArityMismatch { expected: units.len() + 1, found: c.len() });
        }
        let mut search = AssocSearch { units: &lits, clause: c.literals(), structural: false };
        let mut assoc = Vec::new();
        let mut used = vec![false; c.len()];
        if search.run(&mut assoc, &mut used) {
            Ok(assoc)
        } else if search.structural {
            Err(term::NotUnifiable { kind: term::UnifyFailure::Clash }.into())
        } else {
            Err(CrError::NoAssociation)
        }
    }

    /// Unit-propagating resolution with an explicit association.
    pub fn upr_with(&mut self, units: &[NodeId], clause: NodeId, assoc: &[usize]) -> Result<NodeId, CrError> {
        if units.is_empty() {
            return Err(CrError::NoUnits);
        }
        let c = self.get(clause)?.conclusion.clone();
        if c.len() != units.len() + 1 {
            return Err(CrError::ArityMismatch { expected: units.len() + 1, found: c.len() });
        }
        let rest = remaining_position(assoc, c.len()).ok_or(CrError::NoAssociation)?;
        let mut pairs = Vec::with_capacity(units.len());
        for (&u, &a) in units.iter().zip(assoc) {
            let ul = self.unit_of(u)?.clone();
            let cl = &c.literals()[a];
            if cl.pred != ul.pred || cl.positive == ul.positive || cl.args.len() != ul.args.len() {
                return Err(CrError::NoAssociation);
            }
            pairs.push((ul, cl.flipped()));
        }
        let sigma = mgu(&pairs)?;
        let pre = Clause::unit(sigma.apply_literal(&c.literals()[rest]));
        Ok(self.finish(CrRule::Upr { units: units.to_vec(), clause, assoc: assoc.to_vec(), sigma }, pre))
    }

    pub fn conflict(&mut self, left: NodeId, right: NodeId) -> Result<NodeId, CrError> {
        let l = self.unit_of(left)?.clone();
        let r = self.unit_of(right)?.clone();
        if l.positive == r.positive {
            return Err(CrError::SamePolarity(left, right));
        }
        let sigma = unify_atoms(&l, &r)?;
        Ok(self.finish(CrRule::Conflict { left, right, sigma }, Clause::bottom()))
    }

    /// Clause learning discharging each decision in its own group.
    pub fn learn(&mut self, bottom: NodeId, discharged: &[NodeId]) -> Result<NodeId, CrError> {
        self.learn_grouped(bottom, discharged.iter().map(|&d| vec![d]).collect())
    }

    pub fn learn_grouped(&mut self, bottom: NodeId, groups: Vec<Vec<NodeId>>) -> Result<NodeId, CrError> {
        if !self.get(bottom)?.conclusion.is_bottom() {
            return Err(CrError::NotBottom(bottom));
        }
        let mut seen = HashSet::new();
        let mut ancestors = None;
        for &d in groups.iter().flatten() {
            match &self.get(d)?.rule {
                CrRule::Decision { discharged_by } => {
                    if discharged_by.is_some() || !seen.insert(d) {
                        return Err(CrError::AlreadyDischarged(d));
                    }
                }
                _ => return Err(CrError::NotDecision(d)),
            }
            if !self.nodes[bottom].open.contains(&d) {
                let anc = ancestors.get_or_insert_with(|| self.ancestors(bottom));
                return Err(if anc.contains(&d) {
                    CrError::AlreadyDischarged(d)
                } else {
                    CrError::NotAncestor { decision: d, node: bottom }
                });
            }
        }
        let pre = learned_clause(&self.nodes, bottom, &groups);
        self.learned += 1;
        let index = self.learned;
        let id = self.finish(CrRule::Learn { bottom, discharged: groups.clone(), index }, pre);
        for d in groups.into_iter().flatten() {
            self.nodes[d].rule = CrRule::Decision { discharged_by: Some(id) };
        }
        Ok(id)
    }

    /// Distinct instances of `decision` reaching `node`, in path order.
    pub fn path_instances(&self, decision: NodeId, node: NodeId) -> Vec<Literal> {
        path_instances(&self.nodes, decision, node)
    }

    /// Enumerates every path from `decision` to `bottom` depth first (premises
    /// in rule order) and merges compositions that agree on the decision's
    /// variables.
    pub fn path_substitutions(&self, decision: NodeId, bottom: NodeId) -> Result<Vec<PathSubstitution>, CrError> {
        self.get(bottom)?;
        if !self.ancestors(bottom).contains(&decision) {
            return Err(CrError::NotAncestor { decision, node: bottom });
        }
        let dvars = self.nodes[decision].conclusion.vars();
        let mut out: Vec<PathSubstitution> = Vec::new();
        let mut stack = vec![(bottom, Substitution::new())];
        while let Some((n, suffix)) = stack.pop() {
            if n == decision {
                let composition = suffix.restrict(&dvars);
                if !out.iter().any(|p| p.composition == composition) {
                    out.push(PathSubstitution { decision, composition });
                }
                continue;
            }
            let node = &self.nodes[n];
            if node.rule.discharged().any(|d| d == decision) {
                continue;
            }
            let s = node.step().compose(&suffix);
            // reversed so that the first premise is explored first
            for p in node.rule.premises().into_iter().rev() {
                stack.push((p, s.clone()));
            }
        }
        Ok(out)
    }

    /// Appends a node without computing anything; used when loading
    /// certificates. The result must be validated with [`check_derivation`].
    pub fn push_raw(&mut self, rule: CrRule, conclusion: Clause, renaming: Substitution) -> Result<NodeId, CrError> {
        let id = self.nodes.len();
        for p in rule.premises() {
            if p >= id {
                return Err(CrError::UnknownNode(p));
            }
        }
        for d in rule.discharged() {
            if d >= id {
                return Err(CrError::UnknownNode(d));
            }
        }
        if let CrRule::Learn { index, .. } = rule {
            self.learned = self.learned.max(index);
            for d in rule.discharged() {
                if let CrRule::Decision { discharged_by: by @ None } = &mut self.nodes[d].rule {
                    *by = Some(id);
                }
            }
        }
        let rule = match rule {
            CrRule::Decision { .. } => CrRule::Decision { discharged_by: None },
            r => r,
        };
        self.vars.extend(conclusion.vars());
        let open = compute_open(&self.nodes, &rule, id);
        self.nodes.push(CrNode { rule, conclusion, renaming, open });
        Ok(id)
    }

    /// The sub-derivation of the ancestors of `sink`, renumbered so that
    /// `sink` is last. Also returns the old-to-new id map.
    pub fn prune(&self, sink: NodeId) -> (CrDerivation, Vec<Option<NodeId>>) {
        let keep = self.ancestors(sink);
        let mut map = vec![None; self.nodes.len()];
        let mut out = CrDerivation { fresh: self.fresh.clone(), ..CrDerivation::default() };
        for &old in &keep {
            let m = |i: NodeId| map[i].expect("premise kept");
            let node = &self.nodes[old];
            let rule = match &node.rule {
                CrRule::Input => CrRule::Input,
                CrRule::Decision { .. } => CrRule::Decision { discharged_by: None },
                CrRule::Upr { units, clause, assoc, sigma } => CrRule::Upr {
                    units: units.iter().map(|&u| m(u)).collect(),
                    clause: m(*clause),
                    assoc: assoc.clone(),
                    sigma: sigma.clone(),
                },
                CrRule::Conflict { left, right, sigma } => {
                    CrRule::Conflict { left: m(*left), right: m(*right), sigma: sigma.clone() }
                }
                CrRule::Learn { bottom, discharged, index } => CrRule::Learn {
                    bottom: m(*bottom),
                    discharged: discharged.iter().map(|g| g.iter().map(|&d| m(d)).collect()).collect(),
                    index: *index,
                },
            };
            let id = out.push_raw(rule, node.conclusion.clone(), node.renaming.clone()).expect("ids are ordered");
            map[old] = Some(id);
        }
        // the fresh-name counter keeps going so later renamings stay apart
        out.vars.extend(self.vars.iter().cloned());
        (out, map)
    }
}

struct AssocSearch<'a> {
    units: &'a [Literal],
    clause: &'a [Literal],
    structural: bool,
}

impl AssocSearch<'_> {
    fn run(&mut self, assoc: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let k = assoc.len();
        if k == self.units.len() {
            self.structural = true;
            let pairs: Vec<_> =
                assoc.iter().zip(self.units).map(|(&a, u)| (u.clone(), self.clause[a].flipped())).collect();
            return mgu(&pairs).is_ok();
        }
        let u = &self.units[k];
        for j in 0..self.clause.len() {
            let c = &self.clause[j];
            if used[j] || c.pred != u.pred || c.positive == u.positive || c.args.len() != u.args.len() {
                continue;
            }
            used[j] = true;
            assoc.push(j);
            if self.run(assoc, used) {
                return true;
            }
            assoc.pop();
            used[j] = false;
        }
        false
    }
}

/// The clause position not used by `assoc`, if `assoc` is a valid injection
/// missing exactly one of `0..len`.
pub(crate) fn remaining_position(assoc: &[usize], len: usize) -> Option<usize> {
    if assoc.len() + 1 != len {
        return None;
    }
    let mut used = vec![false; len];
    for &a in assoc {
        if a >= len || used[a] {
            return None;
        }
        used[a] = true;
    }
    used.iter().position(|u| !u)
}

pub(crate) fn compute_open(nodes: &[CrNode], rule: &CrRule, id: NodeId) -> BTreeSet<NodeId> {
    match rule {
        CrRule::Input => BTreeSet::new(),
        CrRule::Decision { .. } => [id].into_iter().collect(),
        CrRule::Upr { .. } | CrRule::Conflict { .. } => {
            rule.premises().into_iter().flat_map(|p| nodes[p].open.iter().copied()).collect()
        }
        CrRule::Learn { bottom, .. } => {
            let gone: BTreeSet<NodeId> = rule.discharged().collect();
            nodes[*bottom].open.difference(&gone).copied().collect()
        }
    }
}

/// Distinct instances of the decision literal along every path from
/// `decision` to `node`, first occurrences in depth-first path order.
pub(crate) fn path_instances(nodes: &[CrNode], decision: NodeId, node: NodeId) -> Vec<Literal> {
    if decision > node {
        return Vec::new();
    }
    let mut memo: Vec<Vec<Literal>> = vec![Vec::new(); node - decision + 1];
    memo[0] = nodes[decision].conclusion.literals().to_vec();
    for n in decision + 1..=node {
        let rule = &nodes[n].rule;
        if rule.discharged().any(|d| d == decision) {
            continue;
        }
        let step = nodes[n].step();
        let mut out: Vec<Literal> = Vec::new();
        for p in rule.premises() {
            if p < decision {
                continue;
            }
            for l in &memo[p - decision] {
                let inst = step.apply_literal(l);
                if !out.contains(&inst) {
                    out.push(inst);
                }
            }
        }
        memo[n - decision] = out;
    }
    std::mem::take(&mut memo[node - decision])
}

/// The conclusion of a CL node before renaming.
pub(crate) fn learned_clause(nodes: &[CrNode], bottom: NodeId, groups: &[Vec<NodeId>]) -> Clause {
    let mut lits = Vec::new();
    for group in groups {
        let mut seen: Vec<Literal> = Vec::new();
        for &d in group {
            for inst in path_instances(nodes, d, bottom) {
                let l = inst.flipped();
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
        }
        lits.extend(seen);
    }
    Clause::new(lits)
}

#[cfg(test)]
mod tests;
