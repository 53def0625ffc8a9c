//! Implication (conflict) graphs and their correspondence with CR
//! sub-derivations that end in a single conflict.
//!
//! Vertices are literal instances. A propagated vertex records the clause it
//! was propagated with and its unit premises; vertices whose unit comes from
//! outside the graph (an input unit or a learned unit) are premises.

use thiserror::Error;

use crate::cr::{CrDerivation, CrError, CrRule, NodeId};
use crate::resolution::{ResDerivation, ResError, ResId};
use crate::term::{variant_renaming, Clause, Literal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Decision,
    /// `clause` indexes [`ImplicationGraph::clauses`]; `premises` are vertex
    /// indices, one per resolved clause literal (`assoc`).
    Propagated {
        clause: usize,
        premises: Vec<usize>,
        assoc: Vec<usize>,
    },
    Premise,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub literal: Literal,
    pub kind: VertexKind,
    /// The derivation node this vertex was read from, if any.
    pub origin: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClause {
    pub clause: Clause,
    pub origin: Option<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImplicationGraph {
    /// In topological order: premises of a propagated vertex come first.
    pub vertices: Vec<Vertex>,
    pub clauses: Vec<EdgeClause>,
    /// The two vertices in conflict, in the order of the conflict premises.
    pub conflict: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub clause: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} is not a conflict inference")]
    NotSingleConflict(NodeId),
    #[error("the graph has no conflict")]
    NoConflict,
    #[error("the graph contains non-ground literals")]
    NotGround,
    #[error("both conflicting literals are decisions; no clause to resolve")]
    DecisionsOnly,
    #[error(transparent)]
    Kernel(#[from] CrError),
    #[error(transparent)]
    Resolution(#[from] ResError),
}

impl ImplicationGraph {
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (to, v) in self.vertices.iter().enumerate() {
            if let VertexKind::Propagated { clause, premises, .. } = &v.kind {
                out.extend(premises.iter().map(|&from| Edge { from, to, clause: *clause }));
            }
        }
        out
    }

    pub fn decisions(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().enumerate().filter(|(_, v)| v.kind == VertexKind::Decision).map(|(i, _)| i)
    }

    pub fn is_ground(&self) -> bool {
        self.vertices.iter().all(|v| v.literal.is_ground()) && self.clauses.iter().all(|c| c.clause.is_ground())
    }

    /// Equality up to origins and variable names: same vertex kinds and edge
    /// structure, literals and clauses variants of each other.
    pub fn same_shape(&self, other: &ImplicationGraph) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.clauses.len() == other.clauses.len()
            && self.conflict == other.conflict
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| {
                a.kind == b.kind
                    && variant_renaming(&Clause::unit(a.literal.clone()), &Clause::unit(b.literal.clone())).is_some()
            })
            && self.clauses.iter().zip(&other.clauses).all(|(a, b)| a.clause.is_variant(&b.clause))
    }
}

/// Reads the implication graph of the conflict at `conflict`. Unit premises
/// that are neither decisions nor propagations become premise vertices, and
/// clause premises become edge labels, so learned clauses enter the graph
/// without their own derivations.
pub fn graph_from_cr(d: &CrDerivation, conflict: NodeId) -> Result<ImplicationGraph, GraphError> {
    let (left, right) = match &d.get(conflict)?.rule {
        CrRule::Conflict { left, right, .. } => (*left, *right),
        _ => return Err(GraphError::NotSingleConflict(conflict)),
    };
    // collect unit nodes reachable through unit premises
    let mut units = std::collections::BTreeSet::new();
    let mut stack = vec![left, right];
    while let Some(n) = stack.pop() {
        if units.insert(n) {
            if let CrRule::Upr { units: u, .. } = &d.node(n).rule {
                stack.extend(u.iter().copied());
            }
        }
    }
    let index: std::collections::BTreeMap<NodeId, usize> = units.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut g = ImplicationGraph::default();
    for &n in &units {
        let node = d.node(n);
        let literal = node.unit().expect("unit premise").clone();
        let kind = match &node.rule {
            CrRule::Decision { .. } => VertexKind::Decision,
            CrRule::Upr { units: u, clause, assoc, .. } => {
                let ci = match g.clauses.iter().position(|c| c.origin == Some(*clause)) {
                    Some(i) => i,
                    None => {
                        g.clauses.push(EdgeClause { clause: d.conclusion(*clause).clone(), origin: Some(*clause) });
                        g.clauses.len() - 1
                    }
                };
                VertexKind::Propagated {
                    clause: ci,
                    premises: u.iter().map(|p| index[p]).collect(),
                    assoc: assoc.clone(),
                }
            }
            _ => VertexKind::Premise,
        };
        g.vertices.push(Vertex { literal, kind, origin: Some(n) });
    }
    g.conflict = Some((index[&left], index[&right]));
    Ok(g)
}

/// Rebuilds a CR derivation from a graph: clauses and premise units become
/// inputs. Returns the derivation, the id of its conflict node and the node
/// of every vertex.
pub fn cr_from_graph(g: &ImplicationGraph) -> Result<(CrDerivation, NodeId, Vec<NodeId>), GraphError> {
    let (a, b) = g.conflict.ok_or(GraphError::NoConflict)?;
    let mut d = CrDerivation::new();
    let mut clause_nodes: Vec<Option<NodeId>> = vec![None; g.clauses.len()];
    let mut map = Vec::with_capacity(g.vertices.len());
    for v in &g.vertices {
        let id = match &v.kind {
            VertexKind::Decision => d.decide(&v.literal)?,
            VertexKind::Premise => d.add_input(&Clause::unit(v.literal.clone())),
            VertexKind::Propagated { clause, premises, assoc } => {
                let c = match clause_nodes[*clause] {
                    Some(c) => c,
                    None => {
                        let c = d.add_input(&g.clauses[*clause].clause);
                        clause_nodes[*clause] = Some(c);
                        c
                    }
                };
                let units: Vec<NodeId> = premises.iter().map(|&p| map[p]).collect();
                d.upr_with(&units, c, assoc)?
            }
        };
        map.push(id);
    }
    let conflict = d.conflict(map[a], map[b])?;
    Ok((d, conflict, map))
}

/// The clause learned from the graph by discharging every decision: the
/// disjunction of the duals of all decision instances reaching the conflict.
pub fn analyze_decisions(g: &ImplicationGraph) -> Result<Clause, GraphError> {
    let (mut d, conflict, map) = cr_from_graph(g)?;
    let decisions: Vec<NodeId> = g.decisions().map(|v| map[v]).collect();
    let cl = d.learn(conflict, &decisions)?;
    Ok(d.conclusion(cl).clone())
}

/// Structural comparison of the unit-premise slice above `conflict` in `d`
/// with the derivation rebuilt from its graph.
pub fn round_trip_matches(d: &CrDerivation, conflict: NodeId) -> Result<bool, GraphError> {
    let g = graph_from_cr(d, conflict)?;
    let (rebuilt, rc, map) = cr_from_graph(&g)?;
    let g2 = graph_from_cr(&rebuilt, rc)?;
    if !g.same_shape(&g2) {
        return Ok(false);
    }
    for (v, &node) in g.vertices.iter().zip(&map) {
        let orig = d.node(v.origin.expect("read from a derivation"));
        let new = rebuilt.node(node);
        let same_rule = match (&orig.rule, &new.rule) {
            (CrRule::Decision { .. }, CrRule::Decision { .. }) => true,
            (CrRule::Upr { assoc: a, .. }, CrRule::Upr { assoc: b, .. }) => a == b,
            (_, CrRule::Input) => !matches!(orig.rule, CrRule::Decision { .. } | CrRule::Upr { .. }),
            _ => false,
        };
        if !same_rule || !orig.conclusion.is_variant(&new.conclusion) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A resolution derivation of the learned clause of a ground graph: resolve
/// the reasons of the conflicting pair, then resolve away propagated and
/// premise literals latest first, factoring duplicates as soon as they appear.
pub fn graph_to_resolution(g: &ImplicationGraph) -> Result<ResDerivation, GraphError> {
    let (a, b) = g.conflict.ok_or(GraphError::NoConflict)?;
    if !g.is_ground() {
        return Err(GraphError::NotGround);
    }
    let mut r = ResDerivation::new();
    let mut reason_nodes: Vec<Option<ResId>> = vec![None; g.vertices.len()];
    let mut clause_nodes: Vec<Option<ResId>> = vec![None; g.clauses.len()];
    let mut reason = |r: &mut ResDerivation, v: usize| -> Option<(ResId, usize)> {
        let vx = &g.vertices[v];
        let (id, c) = match &vx.kind {
            VertexKind::Decision => return None,
            VertexKind::Premise => {
                let id = *reason_nodes[v].get_or_insert_with(|| r.add_input(&Clause::unit(vx.literal.clone())));
                (id, r.conclusion(id).clone())
            }
            VertexKind::Propagated { clause, .. } => {
                let id = *clause_nodes[*clause].get_or_insert_with(|| r.add_input(&g.clauses[*clause].clause));
                (id, r.conclusion(id).clone())
            }
        };
        let pos = c.literals().iter().position(|l| *l == vx.literal).expect("reason contains its literal");
        Some((id, pos))
    };
    let mut current = match (reason(&mut r, a), reason(&mut r, b)) {
        (Some((ra, pa)), Some((rb, pb))) => r.resolve(ra, rb, pa, pb)?,
        (Some((ra, _)), None) => ra,
        (None, Some((rb, _))) => rb,
        (None, None) => return Err(GraphError::DecisionsOnly),
    };
    current = factor_duplicates(&mut r, current)?;
    loop {
        // the literal of `current` whose vertex is latest and not a decision
        let c = r.conclusion(current).clone();
        let pick = c
            .literals()
            .iter()
            .enumerate()
            .filter_map(|(pos, l)| {
                let dual = l.flipped();
                let v = g.vertices.iter().rposition(|x| x.literal == dual)?;
                (g.vertices[v].kind != VertexKind::Decision).then_some((v, pos))
            })
            .max();
        let Some((v, pos)) = pick else { break };
        let (rv, pv) = reason(&mut r, v).expect("not a decision");
        current = r.resolve(current, rv, pos, pv)?;
        current = factor_duplicates(&mut r, current)?;
    }
    Ok(r)
}

fn factor_duplicates(r: &mut ResDerivation, mut node: ResId) -> Result<ResId, GraphError> {
    loop {
        let c = r.conclusion(node);
        let group = c.literals().iter().enumerate().find_map(|(i, l)| {
            let same: Vec<usize> = c.literals().iter().enumerate().filter(|(_, m)| *m == l).map(|(j, _)| j).collect();
            (same.len() > 1 && same[0] == i).then_some(same)
        });
        match group {
            Some(g) => node = r.factor(node, &g)?,
            None => return Ok(node),
        }
    }
}
