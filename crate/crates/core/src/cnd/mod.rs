//! Clausal natural deduction (CND): implication and negation
//! introduction/elimination over clauses, and universal quantifier rules.

mod translate;


use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cr::{CrError, NodeId};
use crate::term::{Clause, Literal, Substitution, Term};
use crate::{Report, Violation};

pub use translate::{cr_to_cnd, expand_to_tree, global_substitution, DEFAULT_TREE_LIMIT};

pub type CndId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CndRule {
    /// `[ℓ]^label`; unlabeled assumptions can never be discharged.
    Assumption {
        label: Option<usize>,
    },
    InputClause,
    /// From `ℓ` and `ℓ̄ ∨ Γ` conclude `Γ`.
    ImpE {
        minor: CndId,
        major: CndId,
    },
    /// From `Γ` under `[ℓ]^label` conclude `ℓ̄ ∨ Γ`.
    ImpI {
        body: CndId,
        lit: Literal,
        label: usize,
    },
    AllE {
        premise: CndId,
        sigma: Substitution,
    },
    /// From `Γ{x/α}` conclude `Γ`; `eigen` maps each `x` to its eigenvariable `α`.
    AllI {
        premise: CndId,
        eigen: Substitution,
    },
    /// From `ℓ` and `ℓ̄` conclude ⊥.
    NegE {
        left: CndId,
        right: CndId,
    },
    /// From ⊥ under `[ℓ]^label` conclude `ℓ̄`.
    NegI {
        body: CndId,
        lit: Literal,
        label: usize,
    },
}

impl CndRule {
    pub fn premises(&self) -> Vec<CndId> {
        match self {
            CndRule::Assumption { .. } | CndRule::InputClause => vec![],
            CndRule::ImpE { minor, major } => vec![*minor, *major],
            CndRule::NegE { left, right } => vec![*left, *right],
            CndRule::ImpI { body, .. } | CndRule::NegI { body, .. } => vec![*body],
            CndRule::AllE { premise, .. } | CndRule::AllI { premise, .. } => vec![*premise],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CndRule::Assumption { .. } => "assume",
            CndRule::InputClause => "input",
            CndRule::ImpE { .. } => "impE",
            CndRule::ImpI { .. } => "impI",
            CndRule::AllE { .. } => "allE",
            CndRule::AllI { .. } => "allI",
            CndRule::NegE { .. } => "negE",
            CndRule::NegI { .. } => "negI",
        }
    }

    fn discharge(&self) -> Option<(&Literal, usize)> {
        match self {
            CndRule::ImpI { lit, label, .. } | CndRule::NegI { lit, label, .. } => Some((lit, *label)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CndNode {
    pub rule: CndRule,
    pub conclusion: Clause,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CndError {
    #[error("node {0} does not exist")]
    UnknownNode(CndId),
    #[error("node {0} does not conclude a unit clause")]
    NotUnit(CndId),
    #[error("`{0}` does not occur in the major premise")]
    NoMatch(String),
    #[error("`{left}` and `{right}` are not dual")]
    NotDual { left: String, right: String },
    #[error("node {0} does not conclude ⊥")]
    NotBottom(CndId),
    #[error("`{0}` cannot be assumed")]
    NotAssumable(String),
    #[error("the derivation is not a proof: decisions {0:?} are undischarged")]
    NotProof(Vec<NodeId>),
    #[error("node {0} is used more than once")]
    NotTree(NodeId),
    #[error("tree expansion exceeds {0} nodes")]
    TooLarge(usize),
    #[error("source derivation does not check: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Unchecked(Vec<Violation>),
    #[error(transparent)]
    Kernel(#[from] CrError),
}

/// A CND proof stored as an arena in which premises precede conclusions.
/// The last node is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CndProof {
    nodes: Vec<CndNode>,
}

impl CndProof {
    pub fn new() -> Self {
        CndProof::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CndNode] {
        &self.nodes
    }

    pub fn node(&self, id: CndId) -> &CndNode {
        &self.nodes[id]
    }

    pub fn conclusion(&self, id: CndId) -> &Clause {
        &self.nodes[id].conclusion
    }

    pub fn root(&self) -> Option<CndId> {
        self.nodes.len().checked_sub(1)
    }

    pub fn count(&self, name: &str) -> usize {
        self.nodes.iter().filter(|n| n.rule.name() == name).count()
    }

    fn get(&self, id: CndId) -> Result<&CndNode, CndError> {
        self.nodes.get(id).ok_or(CndError::UnknownNode(id))
    }

    fn unit(&self, id: CndId) -> Result<&Literal, CndError> {
        self.get(id)?.conclusion.as_unit().ok_or(CndError::NotUnit(id))
    }

    fn push(&mut self, rule: CndRule, conclusion: Clause) -> CndId {
        self.nodes.push(CndNode { rule, conclusion });
        self.nodes.len() - 1
    }

    /// Appends a node as given; used when loading certificates.
    pub fn push_raw(&mut self, rule: CndRule, conclusion: Clause) -> Result<CndId, CndError> {
        let id = self.nodes.len();
        if let Some(&p) = rule.premises().iter().find(|&&p| p >= id) {
            return Err(CndError::UnknownNode(p));
        }
        Ok(self.push(rule, conclusion))
    }

    pub fn assume(&mut self, lit: &Literal, label: Option<usize>) -> Result<CndId, CndError> {
        if lit.is_constant_truth() {
            return Err(CndError::NotAssumable(lit.to_string()));
        }
        Ok(self.push(CndRule::Assumption { label }, Clause::unit(lit.clone())))
    }

    pub fn input(&mut self, c: &Clause) -> CndId {
        self.push(CndRule::InputClause, c.clone())
    }

    pub fn imp_e(&mut self, minor: CndId, major: CndId) -> Result<CndId, CndError> {
        let l = self.unit(minor)?.clone();
        let c = imp_e_conclusion(&l, &self.get(major)?.conclusion)
            .ok_or_else(|| CndError::NoMatch(l.flipped().to_string()))?;
        Ok(self.push(CndRule::ImpE { minor, major }, c))
    }

    pub fn neg_e(&mut self, left: CndId, right: CndId) -> Result<CndId, CndError> {
        let (l, r) = (self.unit(left)?, self.unit(right)?);
        if l.flipped() != *r {
            return Err(CndError::NotDual { left: l.to_string(), right: r.to_string() });
        }
        Ok(self.push(CndRule::NegE { left, right }, Clause::bottom()))
    }

    pub fn imp_i(&mut self, body: CndId, lit: &Literal, label: usize) -> Result<CndId, CndError> {
        let mut lits = vec![lit.flipped()];
        lits.extend(self.get(body)?.conclusion.iter().cloned());
        Ok(self.push(CndRule::ImpI { body, lit: lit.clone(), label }, Clause::new(lits)))
    }

    pub fn neg_i(&mut self, body: CndId, lit: &Literal, label: usize) -> Result<CndId, CndError> {
        if !self.get(body)?.conclusion.is_bottom() {
            return Err(CndError::NotBottom(body));
        }
        Ok(self.push(CndRule::NegI { body, lit: lit.clone(), label }, Clause::unit(lit.flipped())))
    }

    pub fn all_e(&mut self, premise: CndId, sigma: &Substitution) -> Result<CndId, CndError> {
        let c = sigma.apply_clause(&self.get(premise)?.conclusion);
        Ok(self.push(CndRule::AllE { premise, sigma: sigma.clone() }, c))
    }

    /// Generalizes `premise` back along `eigen`; the side condition is left
    /// to [`check_cnd`].
    pub fn all_i(&mut self, premise: CndId, eigen: &Substitution, conclusion: &Clause) -> Result<CndId, CndError> {
        self.get(premise)?;
        Ok(self.push(CndRule::AllI { premise, eigen: eigen.clone() }, conclusion.clone()))
    }
}

/// `Γ` from `ℓ` and `ℓ̄ ∨ Γ`, removing the first occurrence of `ℓ̄`.
fn imp_e_conclusion(minor: &Literal, major: &Clause) -> Option<Clause> {
    let dual = minor.flipped();
    let pos = major.iter().position(|l| *l == dual)?;
    Some(Clause::new(major.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, l)| l.clone()).collect()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CndKind {
    /// The root depends on open assumptions.
    #[default]
    Derivation,
    /// Every assumption is discharged.
    Proof,
}

pub type CndReport = Report<CndKind>;

/// Recomputes every inference of `p`, checks that it is tree-shaped, that
/// labels are well-formed and that eigenvariables are fresh.
pub fn check_cnd(p: &CndProof) -> CndReport {
    let mut v = Vec::new();
    let n = p.len();
    if n == 0 {
        v.push(Violation::global("empty proof"));
        return CndReport { kind: CndKind::Derivation, violations: v };
    }
    let mut uses = vec![0usize; n];
    let mut introduced: HashMap<usize, CndId> = HashMap::new();
    // open assumptions below each node
    let mut open: Vec<BTreeSet<CndId>> = Vec::with_capacity(n);
    for (id, node) in p.nodes.iter().enumerate() {
        let prem = node.rule.premises();
        if let Some(&bad) = prem.iter().find(|&&q| q >= id) {
            v.push(Violation::at(id, format!("premise {bad} does not precede the node")));
            open.push(BTreeSet::new());
            continue;
        }
        for &q in &prem {
            uses[q] += 1;
        }
        let mut here: BTreeSet<CndId> = prem.iter().flat_map(|&q| open[q].iter().copied()).collect();
        let c = &node.conclusion;
        let concl = |q: CndId| &p.nodes[q].conclusion;
        match &node.rule {
            CndRule::Assumption { .. } => {
                if c.as_unit().is_none() {
                    v.push(Violation::at(id, "an assumption must be a unit"));
                }
                here.insert(id);
            }
            CndRule::InputClause => {}
            CndRule::ImpE { minor, major } => match concl(*minor).as_unit() {
                None => v.push(Violation::at(id, format!("minor premise {minor} is not a unit"))),
                Some(l) => match imp_e_conclusion(l, concl(*major)) {
                    None => v.push(Violation::at(id, format!("`{}` does not occur in premise {major}", l.flipped()))),
                    Some(expect) if !expect.same_multiset(c) => {
                        v.push(Violation::at(id, format!("expected `{expect}`, found `{c}`")))
                    }
                    Some(_) => {}
                },
            },
            CndRule::NegE { left, right } => match (concl(*left).as_unit(), concl(*right).as_unit()) {
                (Some(l), Some(r)) if l.flipped() == *r => {
                    if !c.is_bottom() {
                        v.push(Violation::at(id, "negation elimination concludes ⊥"));
                    }
                }
                _ => v.push(Violation::at(id, format!("premises {left} and {right} are not dual units"))),
            },
            CndRule::ImpI { body, lit, .. } | CndRule::NegI { body, lit, .. } => {
                let is_neg = matches!(node.rule, CndRule::NegI { .. });
                if is_neg && !concl(*body).is_bottom() {
                    v.push(Violation::at(id, "negation introduction needs a ⊥ premise"));
                }
                let mut expect = vec![lit.flipped()];
                expect.extend(concl(*body).iter().cloned());
                if !Clause::new(expect.clone()).same_multiset(c) {
                    v.push(Violation::at(id, format!("expected `{}`, found `{c}`", Clause::new(expect))));
                }
            }
            CndRule::AllE { premise, sigma } => {
                let expect = sigma.apply_clause(concl(*premise));
                if !expect.same_multiset(c) {
                    v.push(Violation::at(id, format!("expected `{expect}`, found `{c}`")));
                }
            }
            CndRule::AllI { premise, eigen } => {
                check_all_i(id, c, concl(*premise), eigen, &here, p, &mut v);
            }
        }
        if let Some((lit, label)) = node.rule.discharge() {
            if let Some(prev) = introduced.insert(label, id) {
                v.push(Violation::at(id, format!("label {label} is already discharged at node {prev}")));
            }
            here.retain(|&a| {
                let CndRule::Assumption { label: Some(l) } = p.nodes[a].rule else { return true };
                if l != label {
                    return true;
                }
                if p.nodes[a].conclusion.as_unit() != Some(lit) {
                    v.push(Violation::at(a, format!("assumption labelled {label} is not `{lit}`")));
                }
                false
            });
        }
        open.push(here);
    }
    for (id, &u) in uses.iter().enumerate() {
        if u > 1 {
            v.push(Violation::at(id, "node is used more than once"));
        } else if u == 0 && id + 1 != n {
            v.push(Violation::at(id, "node does not lead to the root"));
        }
    }
    let kind = if open[n - 1].is_empty() { CndKind::Proof } else { CndKind::Derivation };
    CndReport { kind, violations: v }
}

fn check_all_i(
    id: CndId,
    c: &Clause,
    premise: &Clause,
    eigen: &Substitution,
    open: &BTreeSet<CndId>,
    p: &CndProof,
    v: &mut Vec<Violation>,
) {
    let mut alphas = BTreeSet::new();
    for (x, t) in eigen.iter() {
        match t {
            Term::Var(a) if alphas.insert(a.clone()) => {
                if c.vars().contains(a) {
                    v.push(Violation::at(id, format!("eigenvariable {a} occurs in the conclusion")));
                }
                for &o in open {
                    if p.nodes[o].conclusion.vars().contains(a) {
                        v.push(Violation::at(id, format!("eigenvariable {a} occurs in open assumption {o}")));
                    }
                }
            }
            _ => v.push(Violation::at(id, format!("{x} is not mapped to a distinct eigenvariable"))),
        }
    }
    let expect = eigen.apply_clause(c);
    if !expect.same_multiset(premise) {
        v.push(Violation::at(id, format!("premise should be `{expect}`, found `{premise}`")));
    }
}

/// Checks that each input clause of `p` is a variant of a clause of `problem`.
pub fn check_cnd_inputs(p: &CndProof, problem: &[Clause]) -> Vec<Violation> {
    p.nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.rule == CndRule::InputClause)
        .filter(|(_, n)| !problem.iter().any(|c| c.is_variant(&n.conclusion)))
        .map(|(i, n)| Violation::at(i, format!("`{}` is not a problem clause", n.conclusion)))
        .collect()
}

impl fmt::Display for CndProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            let prem: Vec<String> = n.rule.premises().iter().map(|p| p.to_string()).collect();
            writeln!(f, "{i}: {} [{}] {}", n.rule.name(), prem.join(","), n.conclusion)?;
        }
        Ok(())
    }
}
