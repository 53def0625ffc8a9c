//! Small reference problems and hand-built derivations, shared by tests,
//! benchmarks and the CLI's self-check.

use crate::cnd::CndProof;
use crate::cr::CrDerivation;
use crate::io::parse_clause;
use crate::resolution::ResDerivation;
use crate::term::{Clause, Literal, Substitution, Term, Var};

fn clauses(src: &[&str]) -> Vec<Clause> {
    src.iter().map(|s| parse_clause(s).expect("valid sample clause")).collect()
}

/// `{P∨Q, P∨¬Q, ¬P∨Q, ¬P∨¬Q}`.
pub fn propositional_square() -> Vec<Clause> {
    clauses(&["p | q", "p | ~q", "~p | q", "~p | ~q"])
}

/// `{P(z)∨Q, P(y)∨¬Q, ¬P(a)∨Q, ¬P(b)∨¬Q}`.
pub fn first_order_square() -> Vec<Clause> {
    clauses(&["p(Z) | q", "p(Y) | ~q", "~p(a) | q", "~p(b) | ~q"])
}

fn lit(s: &str) -> Literal {
    crate::io::parse_literal(s).expect("valid sample literal")
}

/// Refutation of [`propositional_square`]: decide `p`, learn `¬p`, then
/// refute without decisions.
pub fn propositional_square_refutation() -> CrDerivation {
    let mut d = CrDerivation::new();
    let c: Vec<_> = propositional_square().iter().map(|c| d.add_input(c)).collect();
    let p = d.decide(&lit("p")).unwrap();
    let q = d.upr(&[p], c[2]).unwrap();
    let nq = d.upr(&[p], c[3]).unwrap();
    let b = d.conflict(q, nq).unwrap();
    let np = d.learn(b, &[p]).unwrap();
    let q = d.upr(&[np], c[0]).unwrap();
    let nq = d.upr(&[np], c[1]).unwrap();
    d.conflict(q, nq).unwrap();
    d
}

/// Refutation of [`first_order_square`] with the decision `p(X)` first,
/// learning `¬p(a)∨¬p(b)` and then `p(a)`.
///
/// Node layout: inputs 0–3, first tree 4–8, second tree 9–13, final tree 14–17.
pub fn first_order_square_refutation() -> CrDerivation {
    let mut d = CrDerivation::new();
    let c: Vec<_> = first_order_square().iter().map(|c| d.add_input(c)).collect();
    let psi1 = d.decide(&lit("p(X)")).unwrap();
    let q = d.upr(&[psi1], c[2]).unwrap();
    let nq = d.upr(&[psi1], c[3]).unwrap();
    let b = d.conflict(q, nq).unwrap();
    let phi1 = d.learn(b, &[psi1]).unwrap();
    let psi2 = d.decide(&lit("~p(a)")).unwrap();
    let q = d.upr(&[psi2], c[0]).unwrap();
    let nq = d.upr(&[psi2], c[1]).unwrap();
    let b = d.conflict(q, nq).unwrap();
    let phi2 = d.learn(b, &[psi2]).unwrap();
    let npb = d.upr(&[phi2], phi1).unwrap();
    let nq = d.upr(&[npb], c[1]).unwrap();
    let q = d.upr(&[phi2], c[2]).unwrap();
    d.conflict(nq, q).unwrap();
    d
}

/// The two resolution proofs read off the conflict graphs of
/// [`propositional_square`]: `¬p∨q, ¬p∨¬q ⊢ ¬p` (one resolution, one
/// factoring) and the refutation of `p∨q, p∨¬q, ¬p`.
pub fn propositional_square_resolution() -> (ResDerivation, ResDerivation) {
    let mut a = ResDerivation::new();
    let c1 = a.add_input(&parse_clause("~p | q").unwrap());
    let c2 = a.add_input(&parse_clause("~p | ~q").unwrap());
    let r = a.resolve(c1, c2, 1, 1).unwrap();
    a.factor(r, &[0, 1]).unwrap();

    let mut b = ResDerivation::new();
    let c1 = b.add_input(&parse_clause("p | q").unwrap());
    let c2 = b.add_input(&parse_clause("p | ~q").unwrap());
    let np = b.add_input(&parse_clause("~p").unwrap());
    let r = b.resolve(c1, c2, 1, 1).unwrap();
    let f = b.factor(r, &[0, 1]).unwrap();
    b.resolve(f, np, 0, 0).unwrap();
    (a, b)
}

/// The CND refutation of [`first_order_square`] drawn by hand, with the
/// second use of `φ2` written out as a copy under a fresh label.
pub fn first_order_square_cnd() -> CndProof {
    let mut p = CndProof::new();
    let phi2 = |p: &mut CndProof, label: usize| {
        let a = p.assume(&lit("~p(a)"), Some(label)).unwrap();
        let i = p.input(&parse_clause("p(Z) | q").unwrap());
        let e = p.all_e(i, &sub("Z", "a")).unwrap();
        let q = p.imp_e(a, e).unwrap();
        let a = p.assume(&lit("~p(a)"), Some(label)).unwrap();
        let i = p.input(&parse_clause("p(Y) | ~q").unwrap());
        let e = p.all_e(i, &sub("Y", "a")).unwrap();
        let nq = p.imp_e(a, e).unwrap();
        let b = p.neg_e(q, nq).unwrap();
        p.neg_i(b, &lit("~p(a)"), label).unwrap()
    };
    let first = phi2(&mut p, 3);
    let a = p.assume(&lit("p(a)"), Some(2)).unwrap();
    let i = p.input(&parse_clause("~p(a) | q").unwrap());
    let q = p.imp_e(a, i).unwrap();
    let b = p.assume(&lit("p(b)"), Some(1)).unwrap();
    let i = p.input(&parse_clause("~p(b) | ~q").unwrap());
    let nq = p.imp_e(b, i).unwrap();
    let bot = p.neg_e(q, nq).unwrap();
    let npb = p.neg_i(bot, &lit("p(b)"), 1).unwrap();
    let phi1 = p.imp_i(npb, &lit("p(a)"), 2).unwrap();
    let npb = p.imp_e(first, phi1).unwrap();
    let i = p.input(&parse_clause("p(V) | ~q").unwrap());
    let e = p.all_e(i, &sub("V", "b")).unwrap();
    let nq = p.imp_e(npb, e).unwrap();
    let copy = phi2(&mut p, 4);
    let i = p.input(&parse_clause("~p(a) | q").unwrap());
    let q = p.imp_e(copy, i).unwrap();
    p.neg_e(nq, q).unwrap();
    p
}

fn sub(v: &str, c: &str) -> Substitution {
    Substitution::singleton(Var::new(v), Term::constant(c))
}
