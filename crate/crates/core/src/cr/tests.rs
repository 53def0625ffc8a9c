use super::*;
use crate::io::{parse_clause, parse_literal};
use crate::samples::{first_order_square_refutation, propositional_square_refutation};

fn cl(s: &str) -> Clause {
    parse_clause(s).unwrap()
}

fn lit(s: &str) -> Literal {
    parse_literal(s).unwrap()
}

fn sigma_of(d: &CrDerivation, id: NodeId) -> String {
    d.node(id).rule.sigma().unwrap().to_string()
}

#[test]
fn inputs_are_renamed_apart() {
    let mut d = CrDerivation::new();
    let a = d.add_input(&cl("p(X) | q"));
    let b = d.add_input(&cl("p(X) | ~q"));
    assert_eq!(d.conclusion(a).to_string(), "p(X) | q");
    assert!(d.conclusion(b).is_variant(&cl("p(X) | ~q")));
    assert!(d.conclusion(a).vars().is_disjoint(&d.conclusion(b).vars()));
    let e = d.add_input(&Clause::bottom());
    assert!(d.conclusion(e).is_bottom());
    assert!(d.is_refutation());
}

#[test]
fn decisions_are_occurrences() {
    let mut d = CrDerivation::new();
    let a = d.decide(&lit("p")).unwrap();
    let b = d.decide(&lit("p")).unwrap();
    assert_ne!(a, b);
    assert_eq!(d.undischarged(b).iter().copied().collect::<Vec<_>>(), vec![b]);
    assert!(matches!(d.decide(&Literal::bottom()), Err(CrError::NoDual(_))));
    assert!(matches!(d.decide(&Literal::top()), Err(CrError::NoDual(_))));
}

#[test]
fn unit_propagation_examples() {
    let mut d = CrDerivation::new();
    let x = d.decide(&lit("p(X)")).unwrap();
    let c1 = d.add_input(&cl("~p(a) | q"));
    let c2 = d.add_input(&cl("~p(b) | ~q"));
    let u1 = d.upr(&[x], c1).unwrap();
    assert_eq!(d.conclusion(u1).to_string(), "q");
    assert_eq!(sigma_of(&d, u1), "{X/a}");
    let u2 = d.upr(&[x], c2).unwrap();
    assert_eq!(d.conclusion(u2).to_string(), "~q");
    assert_eq!(sigma_of(&d, u2), "{X/b}");

    let pa = d.decide(&lit("p(a)")).unwrap();
    let c3 = d.add_input(&cl("~p(a) | ~p(b)"));
    let u3 = d.upr(&[pa], c3).unwrap();
    assert_eq!(d.conclusion(u3).to_string(), "~p(b)");
    assert_eq!(sigma_of(&d, u3), "{}");
}

#[test]
fn unit_propagation_errors() {
    let mut d = CrDerivation::new();
    let pa = d.decide(&lit("p(a)")).unwrap();
    let c = d.add_input(&cl("~p(b) | q"));
    assert!(matches!(d.upr(&[pa], c), Err(CrError::NotUnifiable(_))));
    let wide = d.add_input(&cl("~p(a) | q | r"));
    assert!(matches!(d.upr(&[pa], wide), Err(CrError::ArityMismatch { expected: 2, found: 3 })));
    let other = d.add_input(&cl("~r | q"));
    assert_eq!(d.upr(&[pa], other), Err(CrError::NoAssociation));
    assert_eq!(d.upr(&[], other), Err(CrError::NoUnits));
    assert!(matches!(d.upr(&[c], other), Err(CrError::NotUnit(_))));
}

#[test]
fn association_skips_non_unifying_candidates() {
    let mut d = CrDerivation::new();
    let pb = d.decide(&lit("p(b)")).unwrap();
    let c = d.add_input(&cl("~p(a) | ~p(b)"));
    let u = d.upr(&[pb], c).unwrap();
    assert_eq!(d.conclusion(u).to_string(), "~p(a)");
}

#[test]
fn conflict_examples() {
    let mut d = CrDerivation::new();
    let q = d.decide(&lit("q")).unwrap();
    let nq = d.add_input(&cl("~q"));
    let b = d.conflict(q, nq).unwrap();
    assert!(d.conclusion(b).is_bottom());
    assert_eq!(sigma_of(&d, b), "{}");

    let px = d.decide(&lit("p(X)")).unwrap();
    let npa = d.add_input(&cl("~p(a)"));
    let b = d.conflict(px, npa).unwrap();
    assert_eq!(sigma_of(&d, b), "{X/a}");

    let pa = d.decide(&lit("p(a)")).unwrap();
    let npb = d.add_input(&cl("~p(b)"));
    assert!(matches!(d.conflict(pa, npb), Err(CrError::NotUnifiable(_))));
    assert!(matches!(d.conflict(pa, px), Err(CrError::SamePolarity(..))));
    let wide = d.add_input(&cl("p | q"));
    assert!(matches!(d.conflict(pa, wide), Err(CrError::NotUnit(_))));
}

#[test]
fn first_order_square_learns_expected_clauses() {
    let d = first_order_square_refutation();
    assert_eq!(d.conclusion(8).to_string(), "~p(a) | ~p(b)");
    assert_eq!(d.conclusion(13).to_string(), "p(a)");
    let r = check_derivation(&d);
    assert!(r.is_ok(), "{:?}", r.violations);
    assert_eq!(r.kind, CrKind::Refutation);
    assert!(d.undischarged(17).is_empty());
    assert_eq!(d.node(4).rule, CrRule::Decision { discharged_by: Some(8) });
    assert_eq!(d.node(9).rule, CrRule::Decision { discharged_by: Some(13) });
}

#[test]
fn propositional_square_learns_not_p() {
    let d = propositional_square_refutation();
    assert_eq!(d.conclusion(8).to_string(), "~p");
    assert_eq!(check_derivation(&d).kind, CrKind::Refutation);
}

#[test]
fn path_substitutions_of_first_tree() {
    let d = first_order_square_refutation();
    let paths = d.path_substitutions(4, 7).unwrap();
    let shown: Vec<String> = paths.iter().map(|p| p.composition.to_string()).collect();
    assert_eq!(shown, vec!["{X/a}", "{X/b}"]);
    assert_eq!(d.path_substitutions(9, 7), Err(CrError::NotAncestor { decision: 9, node: 7 }));
    // both paths of the second tree agree: one merged composition
    assert_eq!(d.path_substitutions(9, 12).unwrap().len(), 1);
}

#[test]
fn single_path_and_diamond() {
    let mut d = CrDerivation::new();
    let p = d.decide(&lit("p")).unwrap();
    let np = d.add_input(&cl("~p"));
    let b = d.conflict(p, np).unwrap();
    let paths = d.path_substitutions(p, b).unwrap();
    assert_eq!(paths.len(), 1);
    assert!(paths[0].composition.is_empty());

    // p → q, p → r, (q, r) → s, s vs ~s
    let mut d = CrDerivation::new();
    let p = d.decide(&lit("p")).unwrap();
    let c1 = d.add_input(&cl("~p | q"));
    let c2 = d.add_input(&cl("~p | r"));
    let c3 = d.add_input(&cl("~q | ~r | s"));
    let ns = d.add_input(&cl("~s"));
    let q = d.upr(&[p], c1).unwrap();
    let r = d.upr(&[p], c2).unwrap();
    let s = d.upr(&[q, r], c3).unwrap();
    let b = d.conflict(s, ns).unwrap();
    assert_eq!(d.path_substitutions(p, b).unwrap().len(), 1);
    assert_eq!(to_sequent(&d).unwrap()[b].antecedent.len(), 2);
}

#[test]
fn learning_errors() {
    let mut d = first_order_square_refutation();
    assert_eq!(d.learn(7, &[4]), Err(CrError::AlreadyDischarged(4)));
    assert_eq!(d.learn(5, &[4]), Err(CrError::NotBottom(5)));
    assert_eq!(d.learn(12, &[0]), Err(CrError::NotDecision(0)));
    let extra = d.decide(&lit("r")).unwrap();
    assert_eq!(d.learn(17, &[extra]), Err(CrError::NotAncestor { decision: extra, node: 17 }));
}

#[test]
fn vacuous_learning_of_bottom() {
    let mut d = CrDerivation::new();
    let p = d.add_input(&cl("p"));
    let np = d.add_input(&cl("~p"));
    let b = d.conflict(p, np).unwrap();
    let l = d.learn(b, &[]).unwrap();
    assert!(d.conclusion(l).is_bottom());
    assert_eq!(check_derivation(&d).kind, CrKind::Refutation);
}

#[test]
fn partial_discharge_leaves_a_derivation() {
    let mut d = CrDerivation::new();
    let p = d.decide(&lit("p")).unwrap();
    let q = d.decide(&lit("q")).unwrap();
    let c = d.add_input(&cl("~p | ~q | r"));
    let nr = d.add_input(&cl("~r"));
    let r = d.upr(&[p, q], c).unwrap();
    let b = d.conflict(r, nr).unwrap();
    let before = d.undischarged(b).clone();
    let l = d.learn(b, &[q]).unwrap();
    assert_eq!(d.conclusion(l).to_string(), "~q");
    assert!(d.undischarged(l).len() < before.len());
    let rep = check_derivation(&d);
    assert!(rep.is_ok());
    assert_eq!(rep.kind, CrKind::Derivation);
    let seq = to_sequent(&d).unwrap();
    assert_eq!(seq[l].to_string(), "p |- ~q");
}

#[test]
fn tampered_substitution_is_reported() {
    let d = first_order_square_refutation();
    let mut nodes: Vec<CrNode> = d.nodes().to_vec();
    if let CrRule::Upr { sigma, .. } = &mut nodes[5].rule {
        *sigma = Substitution::singleton(Var::new("X"), crate::term::Term::constant("b"));
    }
    let mut t = CrDerivation::new();
    for n in nodes {
        t.push_raw(n.rule, n.conclusion, n.renaming).unwrap();
    }
    let r = check_derivation(&t);
    assert!(!r.is_ok());
    assert_eq!(r.violations[0].node, Some(5));
}

#[test]
fn undischarged_decision_at_sink() {
    let mut d = CrDerivation::new();
    let p = d.decide(&lit("p")).unwrap();
    let np = d.add_input(&cl("~p"));
    d.conflict(p, np).unwrap();
    let r = check_derivation(&d);
    assert!(r.is_ok());
    assert_eq!(r.kind, CrKind::Derivation);
}

#[test]
fn sequents() {
    let mut d = CrDerivation::new();
    let x = d.decide(&lit("p(X)")).unwrap();
    assert_eq!(to_sequent(&d).unwrap()[x].to_string(), "p(X) |- p(X)");

    let d = first_order_square_refutation();
    let s = to_sequent(&d).unwrap();
    assert_eq!(s[7].to_string(), "p(a), p(b) |- $false");
    assert!(s[17].antecedent.is_empty());
    assert!(s[0].antecedent.is_empty());
}

#[test]
fn sequent_agrees_with_path_instances() {
    let d = first_order_square_refutation();
    let s = to_sequent(&d).unwrap();
    for (i, seq) in s.iter().enumerate() {
        let mut expected: Vec<Literal> = d.undischarged(i).iter().flat_map(|&k| d.path_instances(k, i)).collect();
        let mut got = seq.antecedent_literals();
        got.sort();
        got.dedup();
        expected.sort();
        assert_eq!(got, expected, "node {i}");
    }
}

#[test]
fn conclusions_share_no_variables() {
    let d = first_order_square_refutation();
    let mut seen = std::collections::BTreeSet::new();
    for n in d.nodes() {
        for v in n.conclusion.vars() {
            assert!(seen.insert(v));
        }
    }
}

#[test]
fn factoring_examples() {
    let mut d = CrDerivation::new();
    let c = d.add_input(&cl("p(X) | p(a)"));
    let f = d.factor(c, &[0, 1]).unwrap();
    assert_eq!(d.conclusion(f).to_string(), "p(a)");
    assert!(check_derivation(&d).is_ok());
    assert!(d.undischarged(f).is_empty());

    let mut d = CrDerivation::new();
    let c = d.add_input(&cl("~p | ~p"));
    let f = d.factor(c, &[0, 1]).unwrap();
    assert_eq!(d.conclusion(f).to_string(), "~p");
    assert!(check_derivation(&d).is_ok());

    let mut d = CrDerivation::new();
    let c = d.add_input(&cl("p(X) | q(Y)"));
    assert!(d.factor(c, &[0, 1]).is_err());
    assert!(d.factor(c, &[0]).is_err());
    let c = d.add_input(&cl("p(a) | p(b)"));
    assert!(matches!(d.factor(c, &[0, 1]), Err(CrError::NotUnifiable(_))));
}

#[test]
fn factoring_with_side_literals() {
    for (src, group, expected) in [
        ("p(X) | q(X) | p(a)", vec![0, 2], "p(a) | q(a)"),
        ("p(X,Y) | r(Y) | p(Z,Z) | s(X,Z) | p(U,b)", vec![0, 2, 4], "p(b,b) | r(b) | s(b,b)"),
        ("q(W) | p(f(X)) | p(Y) | t", vec![1, 2], "p(f(X)) | q(W) | t"),
    ] {
        let mut d = CrDerivation::new();
        let c = d.add_input(&cl(src));
        let f = d.factor(c, &group).unwrap();
        assert!(d.conclusion(f).is_variant(&cl(expected)), "{src}: got {}", d.conclusion(f));
        let r = check_derivation(&d);
        assert!(r.is_ok(), "{src}: {:?}", r.violations);
        assert_eq!(r.kind, CrKind::Proof);
    }
}

#[test]
fn prune_keeps_ancestors_only() {
    let mut d = first_order_square_refutation();
    d.decide(&lit("r")).unwrap();
    let (p, map) = d.prune(17);
    assert_eq!(p.len(), 18);
    assert_eq!(map[18], None);
    assert_eq!(check_derivation(&p).kind, CrKind::Refutation);
}

/// k diamonds in a row where each diamond instantiates one more argument of
/// the decision to `a` on one side and `b` on the other.
fn diamond_chain(k: usize) -> (CrDerivation, NodeId, NodeId) {
    let vars = |prefix: &str, from: usize| -> Vec<String> { (from..k).map(|i| format!("{prefix}{i}")).collect() };
    let atom = |pred: &str, args: &[String]| {
        if args.is_empty() {
            pred.to_string()
        } else {
            format!("{pred}({})", args.join(","))
        }
    };
    let mut d = CrDerivation::new();
    let dec = d.decide(&lit(&atom("r0", &vars("X", 0)))).unwrap();
    let mut cur = dec;
    for i in 0..k {
        let rest = vars("Y", i + 1);
        let with = |c: &str| {
            let mut a = vec![c.to_string()];
            a.extend(rest.clone());
            a
        };
        let ca =
            d.add_input(&cl(&format!("~{} | {}", atom(&format!("r{i}"), &with("a")), atom(&format!("sa{i}"), &rest))));
        let cb =
            d.add_input(&cl(&format!("~{} | {}", atom(&format!("r{i}"), &with("b")), atom(&format!("sb{i}"), &rest))));
        let cj = d.add_input(&cl(&format!(
            "~{} | ~{} | {}",
            atom(&format!("sa{i}"), &rest),
            atom(&format!("sb{i}"), &rest),
            atom(&format!("r{}", i + 1), &rest)
        )));
        let a = d.upr(&[cur], ca).unwrap();
        let b = d.upr(&[cur], cb).unwrap();
        cur = d.upr(&[a, b], cj).unwrap();
    }
    let neg = d.add_input(&cl(&format!("~r{k}")));
    let bottom = d.conflict(cur, neg).unwrap();
    (d, dec, bottom)
}

#[test]
fn antecedents_grow_exponentially_with_diamonds() {
    for k in 1..=10 {
        let (d, dec, bottom) = diamond_chain(k);
        assert_eq!(d.path_substitutions(dec, bottom).unwrap().len(), 1 << k, "k = {k}");
        assert_eq!(d.path_instances(dec, bottom).len(), 1 << k);
        if k <= 6 {
            assert_eq!(to_sequent(&d).unwrap()[bottom].antecedent.len(), 1 << k);
        }
    }
}

#[test]
fn learned_clause_matches_path_substitutions() {
    for d in [first_order_square_refutation(), propositional_square_refutation()] {
        for (i, n) in d.nodes().iter().enumerate() {
            if let CrRule::Learn { bottom, discharged, .. } = &n.rule {
                let mut lits = Vec::new();
                for &k in discharged.iter().flatten() {
                    let l = d.conclusion(k).as_unit().unwrap().clone();
                    for p in d.path_substitutions(k, *bottom).unwrap() {
                        lits.push(p.composition.apply_literal(&l).flipped());
                    }
                }
                let expected = n.renaming.apply_clause(&Clause::new(lits));
                assert_eq!(expected.canonical(), n.conclusion.canonical(), "node {i}");
            }
        }
    }
}
