use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::syntax::{Clause, Literal, Term, Var};

/// A finite map from variables to terms. Application is simultaneous.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    /// The empty substitution ε.
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn singleton(v: Var, t: Term) -> Self {
        let mut s = Substitution::new();
        s.insert(v, t);
        s
    }

    /// Adds a raw binding; identity bindings are dropped.
    pub fn insert(&mut self, v: Var, t: Term) {
        if t == Term::Var(v.clone()) {
            self.bindings.remove(&v);
        } else {
            self.bindings.insert(v, t);
        }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            pred: l.pred.clone(),
            positive: l.positive,
            args: l.args.iter().map(|a| self.apply_term(a)).collect(),
        }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause::new(c.iter().map(|l| self.apply_literal(l)).collect())
    }

    /// Applies `self` first and then `then`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.bindings {
            out.insert(v.clone(), then.apply_term(t));
        }
        for (v, t) in &then.bindings {
            if !self.bindings.contains_key(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Substitution {
        self.bindings.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect()
    }

    /// True when every binding maps to a variable and no two variables share an image.
    pub fn is_renaming(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.bindings.values().all(|t| matches!(t, Term::Var(w) if seen.insert(w.clone())))
    }

    /// Agreement with `other` on every variable of `vars`.
    pub fn agrees_on(&self, other: &Substitution, vars: &BTreeSet<Var>) -> bool {
        vars.iter().all(|v| {
            let t = Term::Var(v.clone());
            self.apply_term(&t) == other.apply_term(&t)
        })
    }

    /// Variables occurring in the range.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.bindings.values().for_each(|t| t.collect_vars(&mut out));
        out
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.insert(v, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}
