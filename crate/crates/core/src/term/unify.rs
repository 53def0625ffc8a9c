//! Syntactic unification with occurs check.
//!
//! Pairs are solved left to right under a running idempotent substitution.
//! When both sides of a binding are open, the right-hand variable is bound,
//! so callers that pass `(premise literal, clause literal)` keep the premise's
//! variables intact whenever possible.

use thiserror::Error;

use super::subst::Substitution;
use super::syntax::{Literal, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnifyFailure {
    Clash,
    OccursCheck,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("not unifiable ({kind:?})")]
pub struct NotUnifiable {
    pub kind: UnifyFailure,
}

impl NotUnifiable {
    fn clash() -> Self {
        NotUnifiable { kind: UnifyFailure::Clash }
    }
}

/// Most general simultaneous unifier of all pairs. Literals in a pair must
/// agree on predicate, arity and polarity.
pub fn mgu(pairs: &[(Literal, Literal)]) -> Result<Substitution, NotUnifiable> {
    let mut s = Substitution::new();
    for (a, b) in pairs {
        unify_literals_into(&mut s, a, b)?;
    }
    Ok(s)
}

pub fn unify_literals_into(s: &mut Substitution, a: &Literal, b: &Literal) -> Result<(), NotUnifiable> {
    if a.pred != b.pred || a.positive != b.positive || a.args.len() != b.args.len() {
        return Err(NotUnifiable::clash());
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        unify_terms_into(s, x, y)?;
    }
    Ok(())
}

/// Unifies the atoms of two literals regardless of polarity.
pub fn unify_atoms(a: &Literal, b: &Literal) -> Result<Substitution, NotUnifiable> {
    let mut s = Substitution::new();
    let b = Literal { positive: a.positive, ..b.clone() };
    unify_literals_into(&mut s, a, &b)?;
    Ok(s)
}

pub fn unify_terms_into(s: &mut Substitution, a: &Term, b: &Term) -> Result<(), NotUnifiable> {
    let a = s.apply_term(a);
    let b = s.apply_term(b);
    match (&a, &b) {
        _ if a == b => Ok(()),
        (_, Term::Var(v)) => bind(s, v, &a),
        (Term::Var(v), _) => bind(s, v, &b),
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            for (x, y) in xs.iter().zip(ys) {
                unify_terms_into(s, x, y)?;
            }
            Ok(())
        }
        _ => Err(NotUnifiable::clash()),
    }
}

fn bind(s: &mut Substitution, v: &Var, t: &Term) -> Result<(), NotUnifiable> {
    if t.occurs(v) {
        return Err(NotUnifiable { kind: UnifyFailure::OccursCheck });
    }
    *s = s.compose(&Substitution::singleton(v.clone(), t.clone()));
    Ok(())
}

/// One-way matching of literals: `pattern·m == target`, with the variables
/// of `target` treated as constants.
pub fn match_literal(pattern: &Literal, target: &Literal) -> Option<Substitution> {
    if pattern.pred != target.pred || pattern.positive != target.positive || pattern.args.len() != target.args.len() {
        return None;
    }
    let mut m = std::collections::BTreeMap::new();
    for (p, t) in pattern.args.iter().zip(&target.args) {
        if !match_strict(p, t, &mut m) {
            return None;
        }
    }
    Some(m.into_iter().collect())
}

/// Matching with an explicit map so that `X ↦ X` constrains later occurrences.
pub fn match_strict(pattern: &Term, target: &Term, m: &mut std::collections::BTreeMap<Var, Term>) -> bool {
    match pattern {
        Term::Var(v) => match m.get(v) {
            Some(bound) => bound == target,
            None => {
                m.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Const(c) => matches!(target, Term::Const(d) if c == d),
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => xs.iter().zip(ys).all(|(x, y)| match_strict(x, y, m)),
            _ => false,
        },
    }
}

/// True when `instance` is an instance of `general`.
pub fn is_instance(instance: &Literal, general: &Literal) -> bool {
    match_literal(general, instance).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn f(n: &str, a: Vec<Term>) -> Term {
        Term::app(n, a)
    }

    #[test]
    fn single_binding() {
        let s = mgu(&[(Literal::pos("p", vec![v("X")]), Literal::pos("p", vec![c("a")]))]).unwrap();
        assert_eq!(s.to_string(), "{X/a}");
    }

    #[test]
    fn occurs_check() {
        let e = mgu(&[(Literal::pos("p", vec![v("X")]), Literal::pos("p", vec![f("f", vec![v("X")])]))]).unwrap_err();
        assert_eq!(e.kind, UnifyFailure::OccursCheck);
    }

    #[test]
    fn nested_example() {
        let l1 = Literal::pos("p", vec![f("f", vec![v("X")]), v("Y")]);
        let l2 = Literal::pos("p", vec![v("Z"), f("g", vec![v("Z")])]);
        let s = mgu(&[(l1.clone(), l2.clone())]).unwrap();
        assert_eq!(s.apply_literal(&l1), s.apply_literal(&l2));
        assert_eq!(s.get(&Var::new("Z")), Some(&f("f", vec![v("X")])));
        assert_eq!(s.get(&Var::new("Y")), Some(&f("g", vec![f("f", vec![v("X")])])));
        assert_eq!(s.compose(&s), s);
    }

    #[test]
    fn clash_and_polarity() {
        let e = mgu(&[(Literal::pos("p", vec![c("a")]), Literal::pos("p", vec![c("b")]))]).unwrap_err();
        assert_eq!(e.kind, UnifyFailure::Clash);
        assert!(mgu(&[(Literal::pos("p", vec![]), Literal::neg("p", vec![]))]).is_err());
        assert!(unify_atoms(&Literal::pos("p", vec![v("X")]), &Literal::neg("p", vec![c("a")])).is_ok());
    }

    #[test]
    fn right_variable_bound_first() {
        let s = mgu(&[(Literal::pos("p", vec![v("U")]), Literal::pos("p", vec![v("X")]))]).unwrap();
        assert_eq!(s.to_string(), "{X/U}");
    }

    #[test]
    fn matching_respects_repeated_variables() {
        let g = Literal::pos("p", vec![v("X"), v("X")]);
        assert!(is_instance(&Literal::pos("p", vec![c("a"), c("a")]), &g));
        assert!(!is_instance(&Literal::pos("p", vec![c("a"), c("b")]), &g));
        assert!(!is_instance(&Literal::pos("p", vec![v("X"), c("b")]), &g));
        assert!(is_instance(&Literal::pos("p", vec![v("X"), v("X")]), &g));
    }
}
