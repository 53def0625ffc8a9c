use super::*;
use crate::cr::{check_derivation, check_inputs, CrKind};
use crate::io::{parse_clause, parse_literal};
use crate::samples::{first_order_square, propositional_square};

fn cs(src: &[&str]) -> Vec<Clause> {
    src.iter().map(|s| parse_clause(s).unwrap()).collect()
}

fn seeded(seed: &str) -> SolverOptions {
    SolverOptions { seed: Some(parse_literal(seed).unwrap()), ..Default::default() }
}

fn assert_refutes(clauses: &[Clause], r: &SolveResult) {
    let d = r.refutation().expect("unsat");
    let report = check_derivation(d);
    assert!(report.is_ok(), "{:?}", report.violations);
    assert_eq!(report.kind, CrKind::Refutation);
    assert!(check_inputs(d, clauses).is_empty());
}

#[test]
fn propositional_square_with_seed() {
    let s = propositional_square();
    let r = solve(&s, &seeded("p"));
    assert_refutes(&s, &r);
    assert_eq!(r.learned[0], parse_clause("~p").unwrap());
    assert_eq!(r.learned.len(), 1);
}

#[test]
fn propositional_square_without_seed() {
    let s = propositional_square();
    assert_refutes(&s, &solve(&s, &SolverOptions::default()));
}

#[test]
fn first_order_square_with_seed() {
    let s = first_order_square();
    let r = solve(&s, &seeded("p(X)"));
    assert_refutes(&s, &r);
    assert!(r.learned[0].is_variant(&parse_clause("~p(a) | ~p(b)").unwrap()), "{}", r.learned[0]);
    assert!(r.learned[1].is_variant(&parse_clause("p(a)").unwrap()), "{}", r.learned[1]);
}

#[test]
fn first_order_square_without_seed() {
    let s = first_order_square();
    assert_refutes(&s, &solve(&s, &SolverOptions::default()));
}

#[test]
fn satisfiable_sets_saturate() {
    let r = solve(&cs(&["p(X)", "~q(a)"]), &SolverOptions::default());
    assert!(matches!(r.verdict, Verdict::Unknown(UnknownReason::Saturated)));
    let r = solve(&cs(&["p | q", "~p | q"]), &SolverOptions::default());
    assert!(matches!(r.verdict, Verdict::Unknown(UnknownReason::Saturated)));
}

#[test]
fn first_order_propagation() {
    let s = cs(&["p(X)", "~p(a) | q", "~q"]);
    let r = solve(&s, &SolverOptions::default());
    assert_refutes(&s, &r);
    assert_eq!(r.stats.decisions, 0);
    let r = solve(&cs(&["p(a)", "~p(b) | q", "~q"]), &SolverOptions::default());
    assert!(r.refutation().is_none());
}

#[test]
fn repeated_unit_is_renamed() {
    // needs p(X) twice with different instances
    let s = cs(&["p(X)", "~p(a) | ~p(b) | q", "~q"]);
    let r = solve(&s, &SolverOptions::default());
    assert_refutes(&s, &r);
}

#[test]
fn empty_clause_input() {
    let s = cs(&["p", "$false"]);
    assert_refutes(&s, &solve(&s, &SolverOptions::default()));
}

#[test]
fn limits_give_unknown() {
    let s = cs(&["p(a)", "~p(X) | p(f(X))", "~p(f(f(f(f(f(f(f(f(a)))))))))"]);
    let r = solve(&s, &SolverOptions { limits: Limits { max_term_depth: 3, ..Default::default() }, seed: None });
    assert!(r.refutation().is_none());
    assert!(r.stats.too_deep > 0);
    let r = solve(&s, &SolverOptions { limits: Limits { max_term_depth: 10, ..Default::default() }, seed: None });
    assert_refutes(&s, &r);
    let r = solve(&s, &SolverOptions { limits: Limits { max_propagations: 2, ..Default::default() }, seed: None });
    assert!(matches!(r.verdict, Verdict::Unknown(UnknownReason::PropagationLimit)));
}

#[test]
fn decision_limit() {
    let s = propositional_square();
    let r = solve(&s, &SolverOptions { limits: Limits { max_decisions: 0, ..Default::default() }, seed: None });
    assert!(matches!(r.verdict, Verdict::Unknown(UnknownReason::DecisionLimit)));
}

#[test]
fn herbrand_base() {
    let atoms = herbrand_atoms(&cs(&["p(X, a) | q(b)"]), 2, 100);
    let shown: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    assert_eq!(shown, ["p(a,a)", "p(a,b)", "p(b,a)", "p(b,b)", "q(a)", "q(b)"]);
    let atoms = herbrand_atoms(&cs(&["p(X)"]), 2, 100);
    assert_eq!(atoms.len(), 1);
    assert_eq!(herbrand_atoms(&cs(&["p(f(X))", "q(a)"]), 2, 100).len(), 6);
}
