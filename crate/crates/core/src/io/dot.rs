//! Graphviz rendering of implication graphs.

use std::fmt::Write as _;

use crate::graph::{ImplicationGraph, VertexKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders `g` as a DOT digraph. Vertices keep their index order: decisions
/// are bold boxes, propagated literals ellipses, premises diamonds, and the
/// conflicting pair is drawn in red with a dashed edge between them. Edge
/// labels name the clause that justified the propagation (`c<k>`).
pub fn export_dot(g: &ImplicationGraph) -> String {
    let mut out = String::from("digraph conflict {\n");
    let in_conflict = |i: usize| g.conflict.is_some_and(|(a, b)| a == i || b == i);
    for (i, v) in g.vertices.iter().enumerate() {
        let shape = match v.kind {
            VertexKind::Decision => "shape=box, style=bold",
            VertexKind::Propagated { .. } => "shape=ellipse",
            VertexKind::Premise => "shape=diamond",
        };
        let color = if in_conflict(i) { ", color=red" } else { "" };
        let _ = writeln!(out, "  v{i} [label={}, {shape}{color}];", quote(&v.literal.to_string()));
    }
    for e in g.edges() {
        let clause = quote(&format!("c{}: {}", e.clause, g.clauses[e.clause].clause));
        let _ = writeln!(out, "  v{} -> v{} [label={clause}];", e.from, e.to);
    }
    if let Some((a, b)) = g.conflict {
        let _ = writeln!(out, "  v{a} -> v{b} [dir=none, style=dashed, color=red, label=\"conflict\"];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_cr;
    use crate::samples;

    #[test]
    fn empty_graph() {
        assert_eq!(export_dot(&ImplicationGraph::default()), "digraph conflict {\n}\n");
    }

    #[test]
    fn first_propositional_graph() {
        let g = graph_from_cr(&samples::propositional_square_refutation(), 7).unwrap();
        let dot = export_dot(&g);
        assert_eq!(dot.lines().filter(|l| l.contains(" [label=") && !l.contains("->")).count(), 3);
        assert!(dot.contains("v0 [label=\"p\", shape=box, style=bold];"), "{dot}");
        assert_eq!(dot.matches("shape=ellipse, color=red").count(), 2, "{dot}");
        assert!(dot.contains("v1 -> v2 [dir=none, style=dashed, color=red"), "{dot}");
        assert_eq!(dot, export_dot(&g));
    }

    #[test]
    fn first_order_graph_marks_decision() {
        let g = graph_from_cr(&samples::first_order_square_refutation(), 7).unwrap();
        let dot = export_dot(&g);
        assert!(dot.contains("[label=\"p(X)\", shape=box, style=bold]"), "{dot}");
        assert!(dot.contains("[label=\"q\", shape=ellipse, color=red]"), "{dot}");
        assert!(dot.contains("[label=\"~q\", shape=ellipse, color=red]"), "{dot}");
    }
}
