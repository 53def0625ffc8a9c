//! Solver refutations through every consumer: checker, certificates, CND
//! translation and conflict graphs.

mod common;

use common::*;
use conflict_resolution::cnd::{check_cnd, cr_to_cnd, CndKind};
use conflict_resolution::cr::{check_derivation, CrKind};
use conflict_resolution::graph::{graph_from_cr, graph_to_resolution};
use conflict_resolution::io::{load_certificate, Certificate, ProblemFile};
use conflict_resolution::resolution::check_resolution;
use conflict_resolution::search::{solve, SolverOptions, Verdict};
use conflict_resolution::transform::resolution_to_cr;
use conflict_resolution::{Clause, CrDerivation, CrRule};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn refutations(problems: impl Iterator<Item = Vec<Clause>>) -> Vec<(Vec<Clause>, CrDerivation)> {
    problems
        .filter_map(|p| match solve(&p, &SolverOptions::default()).verdict {
            Verdict::Unsat(d) => Some((p, d)),
            Verdict::Unknown(_) => None,
        })
        .collect()
}

#[test]
fn ground_refutations_survive_every_consumer() {
    let mut rng = StdRng::seed_from_u64(11);
    let found = refutations((0..300).map(|_| random_ground_cnf(&mut rng, 10, 30)));
    assert!(found.len() > 50);
    for (problem, d) in &found {
        let r = check_derivation(d);
        assert!(r.is_ok() && r.kind == CrKind::Refutation, "{:?}", r.violations);

        let file = ProblemFile::from_clauses(problem);
        let text = Certificate::cr(d.clone(), Some(file.digest())).to_string();
        let back = load_certificate(&text).unwrap();
        assert!(back.check_against(&file).is_empty());
        assert_eq!(back.into_cr().unwrap().nodes(), d.nodes());

        let cnd = cr_to_cnd(d).unwrap();
        let cr = check_cnd(&cnd);
        assert!(cr.is_ok() && cr.kind == CndKind::Proof, "{:?}", cr.violations);
        assert!(cnd.conclusion(cnd.root().unwrap()).is_bottom());
        let text = Certificate::cnd(cnd.clone(), None).to_string();
        assert_eq!(load_certificate(&text).unwrap().into_cnd().unwrap(), cnd);
    }
}

#[test]
fn ground_conflict_graphs_yield_resolution_proofs() {
    let mut rng = StdRng::seed_from_u64(12);
    let found = refutations((0..200).map(|_| random_ground_cnf(&mut rng, 8, 25)));
    let mut graphs = 0;
    for (_, d) in &found {
        for (i, n) in d.nodes().iter().enumerate() {
            if !matches!(n.rule, CrRule::Conflict { .. }) {
                continue;
            }
            let g = graph_from_cr(d, i).unwrap();
            if g.decisions().count() == 0
                && g.vertices.iter().all(|v| v.kind != conflict_resolution::graph::VertexKind::Premise)
            {
                continue;
            }
            let Ok(res) = graph_to_resolution(&g) else { continue };
            assert!(check_resolution(&res).is_ok());
            let sim = resolution_to_cr(&res).unwrap();
            assert!(check_derivation(&sim.cr).is_ok());
            graphs += 1;
        }
    }
    assert!(graphs > 20, "{graphs}");
}

#[test]
fn first_order_refutations_translate() {
    let mut rng = StdRng::seed_from_u64(13);
    let found = refutations((0..150).map(|_| random_bs_problem(&mut rng)));
    assert!(found.len() > 30);
    for (problem, d) in &found {
        assert!(!herbrand_sat(problem));
        let cnd = cr_to_cnd(d).unwrap();
        let r = check_cnd(&cnd);
        assert!(r.is_ok() && r.kind == CndKind::Proof, "{:?}\n{cnd}", r.violations);
        let file = ProblemFile::from_clauses(problem);
        let text = Certificate::cnd(cnd, Some(file.digest())).to_string();
        assert!(load_certificate(&text).unwrap().check_against(&file).is_empty());
    }
}
