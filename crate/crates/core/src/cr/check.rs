//! Independent re-validation of CR derivations.

use std::collections::{BTreeMap, BTreeSet};

use super::{compute_open, learned_clause, remaining_position, CrDerivation, CrNode, CrRule, NodeId};
use crate::term::{Clause, Var};
use crate::{Report, Violation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CrKind {
    /// Some decision at the sink is still undischarged.
    #[default]
    Derivation,
    Proof,
    Refutation,
}

pub type CrReport = Report<CrKind>;

/// Recomputes every node from its premises and stored substitutions.
pub fn check_derivation(d: &CrDerivation) -> CrReport {
    let nodes = d.nodes();
    let mut v = Vec::new();
    // open sets recomputed here rather than trusted from the nodes
    let mut open: Vec<BTreeSet<NodeId>> = Vec::with_capacity(nodes.len());
    let mut shadow: Vec<CrNode> = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        if let Some(p) = node.rule.premises().into_iter().chain(node.rule.discharged()).find(|&p| p >= i) {
            v.push(Violation::at(i, format!("refers to node {p}, which does not precede it")));
            open.push(BTreeSet::new());
            shadow.push(node.clone());
            continue;
        }
        if !node.renaming.is_renaming() {
            v.push(Violation::at(i, "stored renaming is not a variable renaming"));
        }
        check_node(&shadow, i, node, &mut v);
        let o = compute_open(&shadow, &node.rule, i);
        open.push(o.clone());
        shadow.push(CrNode { open: o, ..node.clone() });
    }
    if !v.is_empty() {
        return Report { kind: CrKind::Derivation, violations: v };
    }
    check_discharge(d, &mut v);
    check_apart(nodes, &mut v);
    let kind = match d.sink() {
        Some(s) if open[s].is_empty() && nodes[s].conclusion.is_bottom() => CrKind::Refutation,
        Some(s) if open[s].is_empty() => CrKind::Proof,
        _ => CrKind::Derivation,
    };
    Report { kind, violations: v }
}

fn check_node(nodes: &[CrNode], i: NodeId, node: &CrNode, v: &mut Vec<Violation>) {
    let expect = |v: &mut Vec<Violation>, pre: Clause| {
        let renamed = node.renaming.apply_clause(&pre);
        if !renamed.same_multiset(&node.conclusion) {
            v.push(Violation::at(i, format!("conclusion `{}` differs from computed `{}`", node.conclusion, renamed)));
        }
    };
    match &node.rule {
        CrRule::Input => {}
        CrRule::Decision { .. } => match node.unit() {
            Some(l) if !l.is_constant_truth() => {}
            _ => v.push(Violation::at(i, "decision must conclude a literal other than verum/falsum")),
        },
        CrRule::Upr { units, clause, assoc, sigma } => {
            let c = &nodes[*clause].conclusion;
            if units.is_empty() {
                v.push(Violation::at(i, "no unit premises"));
                return;
            }
            let Some(rest) = remaining_position(assoc, c.len()) else {
                v.push(Violation::at(i, format!("association {assoc:?} does not fit a clause of length {}", c.len())));
                return;
            };
            for (&u, &a) in units.iter().zip(assoc) {
                let Some(ul) = nodes[u].unit() else {
                    v.push(Violation::at(i, format!("premise {u} is not a unit")));
                    return;
                };
                let cl = &c.literals()[a];
                if ul.positive == cl.positive || sigma.apply_literal(ul) != sigma.apply_literal(&cl.flipped()) {
                    v.push(Violation::at(i, format!("substitution does not unify `{ul}` with the dual of `{cl}`")));
                    return;
                }
            }
            expect(v, Clause::unit(sigma.apply_literal(&c.literals()[rest])));
        }
        CrRule::Conflict { left, right, sigma } => {
            let (Some(l), Some(r)) = (nodes[*left].unit(), nodes[*right].unit()) else {
                v.push(Violation::at(i, "conflict premises must be units"));
                return;
            };
            if l.positive == r.positive {
                v.push(Violation::at(i, "conflict premises have the same polarity"));
            } else if !sigma.apply_literal(l).same_atom(&sigma.apply_literal(r)) {
                v.push(Violation::at(i, format!("substitution does not unify `{l}` and `{r}`")));
            }
            expect(v, Clause::bottom());
        }
        CrRule::Learn { bottom, discharged, .. } => {
            if !nodes[*bottom].conclusion.is_bottom() {
                v.push(Violation::at(i, format!("premise {bottom} is not the empty clause")));
                return;
            }
            let bottom_open = &nodes[*bottom].open;
            let mut seen = BTreeSet::new();
            for &d in discharged.iter().flatten() {
                if !matches!(nodes[d].rule, CrRule::Decision { .. }) {
                    v.push(Violation::at(i, format!("discharges non-decision {d}")));
                    return;
                }
                if !seen.insert(d) {
                    v.push(Violation::at(i, format!("discharges {d} twice")));
                }
                if !bottom_open.contains(&d) {
                    v.push(Violation::at(i, format!("decision {d} is not undischarged above node {bottom}")));
                }
            }
            expect(v, learned_clause(nodes, *bottom, discharged));
        }
    }
}

/// Every discharged decision must be discharged by exactly one CL node, and
/// that node must lie on every path from the decision to the sink.
fn check_discharge(d: &CrDerivation, v: &mut Vec<Violation>) {
    let nodes = d.nodes();
    let mut by: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        for x in n.rule.discharged() {
            by.entry(x).or_default().push(i);
        }
    }
    for (i, n) in nodes.iter().enumerate() {
        if let CrRule::Decision { discharged_by } = n.rule {
            let claimed = by.get(&i).cloned().unwrap_or_default();
            match (discharged_by, claimed.as_slice()) {
                (None, []) => {}
                (Some(c), [c2]) if c == *c2 => {}
                _ => v.push(Violation::at(
                    i,
                    format!("inconsistent discharge: label {discharged_by:?}, claimed by {claimed:?}"),
                )),
            }
        }
    }
    let Some(sink) = d.sink() else { return };
    let children = d.children();
    let live = d.ancestors(sink);
    for (&dec, cls) in &by {
        if !live.contains(&dec) {
            continue;
        }
        let cl = cls[0];
        let mut seen = BTreeSet::new();
        let mut stack = vec![dec];
        while let Some(n) = stack.pop() {
            if n == cl || !seen.insert(n) {
                continue;
            }
            if n == sink {
                v.push(Violation::at(dec, format!("reaches the sink without passing its CL node {cl}")));
                break;
            }
            stack.extend(children[n].iter().copied());
        }
    }
}

fn check_apart(nodes: &[CrNode], v: &mut Vec<Violation>) {
    let mut owner: BTreeMap<Var, NodeId> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        for x in n.conclusion.vars() {
            if let Some(j) = owner.insert(x.clone(), i) {
                v.push(Violation::at(i, format!("shares variable {x} with node {j}")));
            }
        }
    }
}

/// Every input node must be a variant of some problem clause.
pub fn check_inputs(d: &CrDerivation, problem: &[Clause]) -> Vec<Violation> {
    let canon: BTreeSet<String> = problem.iter().map(|c| c.canonical().to_string()).collect();
    d.inputs()
        .filter(|&i| {
            let c = d.conclusion(i);
            !canon.contains(&c.canonical().to_string()) && !problem.iter().any(|p| p.is_variant(c))
        })
        .map(|i| Violation::at(i, format!("input `{}` is not a problem clause", d.conclusion(i))))
        .collect()
}
