//! Binary resolution and factoring, with explicit literal positions so
//! checking never searches.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{self, mgu, rename_apart, unify_atoms, Clause, FreshVars, Literal, Substitution, Var};
use crate::{Report, Violation};

pub type ResId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResRule {
    Input,
    /// Resolves `left[lpos]` against `right[rpos]`.
    Resolution {
        left: ResId,
        right: ResId,
        lpos: usize,
        rpos: usize,
        sigma: Substitution,
    },
    /// Merges the literals at `positions`; the merged literal comes first in
    /// the conclusion, followed by the others in order.
    Factoring {
        premise: ResId,
        positions: Vec<usize>,
        sigma: Substitution,
    },
}

impl ResRule {
    pub fn premises(&self) -> Vec<ResId> {
        match self {
            ResRule::Input => vec![],
            ResRule::Resolution { left, right, .. } => vec![*left, *right],
            ResRule::Factoring { premise, .. } => vec![*premise],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResRule::Input => "input",
            ResRule::Resolution { .. } => "resolve",
            ResRule::Factoring { .. } => "factor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResNode {
    pub rule: ResRule,
    pub conclusion: Clause,
    pub renaming: Substitution,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ResError {
    #[error("node {0} does not exist")]
    UnknownNode(ResId),
    #[error("position {pos} is out of range for node {node}")]
    BadPosition { node: ResId, pos: usize },
    #[error("resolved literals have the same polarity")]
    SamePolarity,
    #[error("{0}")]
    NotUnifiable(#[from] term::NotUnifiable),
    #[error("cannot factor: {0}")]
    NotFactorable(String),
}

#[derive(Clone, Debug, Default)]
pub struct ResDerivation {
    nodes: Vec<ResNode>,
    vars: BTreeSet<Var>,
    fresh: FreshVars,
}

impl ResDerivation {
    pub fn new() -> Self {
        ResDerivation::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ResNode] {
        &self.nodes
    }

    pub fn node(&self, id: ResId) -> &ResNode {
        &self.nodes[id]
    }

    pub fn conclusion(&self, id: ResId) -> &Clause {
        &self.nodes[id].conclusion
    }

    pub fn sink(&self) -> Option<ResId> {
        self.nodes.len().checked_sub(1)
    }

    pub fn resolutions(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.rule, ResRule::Resolution { .. })).count()
    }

    pub fn factorings(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.rule, ResRule::Factoring { .. })).count()
    }

    fn get(&self, id: ResId) -> Result<&ResNode, ResError> {
        self.nodes.get(id).ok_or(ResError::UnknownNode(id))
    }

    fn finish(&mut self, rule: ResRule, pre: Clause) -> ResId {
        let (conclusion, renaming) = rename_apart(&pre, &self.vars, &mut self.fresh);
        self.vars.extend(conclusion.vars());
        self.nodes.push(ResNode { rule, conclusion, renaming });
        self.nodes.len() - 1
    }

    pub fn add_input(&mut self, c: &Clause) -> ResId {
        self.finish(ResRule::Input, c.clone())
    }

    pub fn resolve(&mut self, left: ResId, right: ResId, lpos: usize, rpos: usize) -> Result<ResId, ResError> {
        let l = literal_at(&self.get(left)?.conclusion, left, lpos)?.clone();
        let r = literal_at(&self.get(right)?.conclusion, right, rpos)?.clone();
        if l.positive == r.positive {
            return Err(ResError::SamePolarity);
        }
        let sigma = unify_atoms(&l, &r)?;
        let pre = resolvent(&self.nodes[left].conclusion, &self.nodes[right].conclusion, lpos, rpos, &sigma);
        Ok(self.finish(ResRule::Resolution { left, right, lpos, rpos, sigma }, pre))
    }

    pub fn factor(&mut self, premise: ResId, positions: &[usize]) -> Result<ResId, ResError> {
        let c = self.get(premise)?.conclusion.clone();
        let mut uniq = positions.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() < 2 || uniq.len() != positions.len() {
            return Err(ResError::NotFactorable(format!("need at least two distinct positions, got {positions:?}")));
        }
        for &p in positions {
            literal_at(&c, premise, p)?;
        }
        let first = &c.literals()[positions[0]];
        let pairs: Vec<(Literal, Literal)> =
            positions[1..].iter().map(|&p| (first.clone(), c.literals()[p].clone())).collect();
        let sigma = mgu(&pairs)?;
        let pre = factor_clause(&c, positions, &sigma);
        Ok(self.finish(ResRule::Factoring { premise, positions: positions.to_vec(), sigma }, pre))
    }

    /// Appends a node without computing it; see [`check_resolution`].
    pub fn push_raw(&mut self, rule: ResRule, conclusion: Clause, renaming: Substitution) -> Result<ResId, ResError> {
        let id = self.nodes.len();
        if let Some(p) = rule.premises().into_iter().find(|&p| p >= id) {
            return Err(ResError::UnknownNode(p));
        }
        self.vars.extend(conclusion.vars());
        self.nodes.push(ResNode { rule, conclusion, renaming });
        Ok(id)
    }
}

fn literal_at(c: &Clause, node: ResId, pos: usize) -> Result<&Literal, ResError> {
    c.literals().get(pos).ok_or(ResError::BadPosition { node, pos })
}

fn resolvent(left: &Clause, right: &Clause, lpos: usize, rpos: usize, sigma: &Substitution) -> Clause {
    let lits = left
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != lpos)
        .chain(right.iter().enumerate().filter(|(i, _)| *i != rpos))
        .map(|(_, l)| sigma.apply_literal(l))
        .collect();
    Clause::new(lits)
}

fn factor_clause(c: &Clause, positions: &[usize], sigma: &Substitution) -> Clause {
    let first = &c.literals()[positions[0]];
    let rest = c.iter().enumerate().filter(|(i, _)| !positions.contains(i)).map(|(_, l)| l);
    Clause::new(std::iter::once(first).chain(rest).map(|l| sigma.apply_literal(l)).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ResKind {
    #[default]
    Derivation,
    Refutation,
}

pub type ResReport = Report<ResKind>;

/// Recomputes each inference from the stored positions and unifier and
/// compares conclusions modulo variable renaming.
pub fn check_resolution(d: &ResDerivation) -> ResReport {
    let mut v = Vec::new();
    let nodes = d.nodes();
    for (i, n) in nodes.iter().enumerate() {
        if let Some(p) = n.rule.premises().into_iter().find(|&p| p >= i) {
            v.push(Violation::at(i, format!("refers to node {p}, which does not precede it")));
            continue;
        }
        let pre = match &n.rule {
            ResRule::Input => continue,
            ResRule::Resolution { left, right, lpos, rpos, sigma } => {
                let (lc, rc) = (&nodes[*left].conclusion, &nodes[*right].conclusion);
                let (Some(l), Some(r)) = (lc.literals().get(*lpos), rc.literals().get(*rpos)) else {
                    v.push(Violation::at(i, "resolved position out of range"));
                    continue;
                };
                if l.positive == r.positive || !sigma.apply_literal(l).same_atom(&sigma.apply_literal(r)) {
                    v.push(Violation::at(i, format!("substitution does not make `{l}` and `{r}` complementary")));
                    continue;
                }
                resolvent(lc, rc, *lpos, *rpos, sigma)
            }
            ResRule::Factoring { premise, positions, sigma } => {
                let c = &nodes[*premise].conclusion;
                let mut uniq = positions.clone();
                uniq.sort_unstable();
                uniq.dedup();
                if uniq.len() < 2 || uniq.len() != positions.len() || uniq.iter().any(|&p| p >= c.len()) {
                    v.push(Violation::at(i, "bad factoring positions"));
                    continue;
                }
                let merged = sigma.apply_literal(&c.literals()[positions[0]]);
                if positions.iter().any(|&p| sigma.apply_literal(&c.literals()[p]) != merged) {
                    v.push(Violation::at(i, "substitution does not unify the factored literals"));
                    continue;
                }
                factor_clause(c, positions, sigma)
            }
        };
        if !pre.is_variant(&n.conclusion) {
            v.push(Violation::at(i, format!("conclusion `{}` is not a variant of `{pre}`", n.conclusion)));
        }
    }
    let mut owner: BTreeMap<Var, ResId> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        for x in n.conclusion.vars() {
            if let Some(j) = owner.insert(x.clone(), i) {
                v.push(Violation::at(i, format!("shares variable {x} with node {j}")));
            }
        }
    }
    let kind = match d.sink() {
        Some(s) if nodes[s].conclusion.is_bottom() => ResKind::Refutation,
        _ => ResKind::Derivation,
    };
    Report { kind, violations: v }
}
