//! First-order terms, literals and clauses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::subst::Substitution;
use super::TermError;

/// Predicate name reserved for verum.
pub const TOP: &str = "$true";
/// Predicate name reserved for falsum.
pub const BOTTOM: &str = "$false";

/// A variable. Names produced by [`FreshVars`] carry a `.N` suffix, which the
/// problem parser never accepts, so fresh names cannot collide with input names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The name without any freshness suffix.
    pub fn base(&self) -> &str {
        match self.0.rfind('.') {
            Some(i) if i + 1 < self.0.len() && self.0[i + 1..].bytes().all(|b| b.is_ascii_digit()) => &self.0[..i],
            _ => &self.0,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(String),
    /// Function application; always at least one argument.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    /// Builds an application, collapsing to a constant when `args` is empty.
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Const(name.to_string())
        } else {
            Term::App(name.to_string(), args)
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars_in_order(out)),
        }
    }

    /// Nesting depth of function symbols: variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Records every function/constant symbol with its arity.
    pub fn collect_functions(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.entry(c.clone()).or_insert(0);
            }
            Term::App(f, args) => {
                out.entry(f.clone()).or_insert(args.len());
                args.iter().for_each(|a| a.collect_functions(out));
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(c),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A possibly negated atom. Negation is a polarity flag, so double negation
/// cannot be stacked syntactically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub pred: String,
    pub positive: bool,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(positive: bool, pred: &str, args: Vec<Term>) -> Literal {
        Literal { pred: pred.to_string(), positive, args }
    }

    pub fn pos(pred: &str, args: Vec<Term>) -> Literal {
        Literal::new(true, pred, args)
    }

    pub fn neg(pred: &str, args: Vec<Term>) -> Literal {
        Literal::new(false, pred, args)
    }

    pub fn top() -> Literal {
        Literal::pos(TOP, vec![])
    }

    pub fn bottom() -> Literal {
        Literal::pos(BOTTOM, vec![])
    }

    /// True for `$true` and `~$false`.
    pub fn is_top(&self) -> bool {
        self.args.is_empty() && ((self.positive && self.pred == TOP) || (!self.positive && self.pred == BOTTOM))
    }

    /// True for `$false` and `~$true`.
    pub fn is_bottom(&self) -> bool {
        self.args.is_empty() && ((self.positive && self.pred == BOTTOM) || (!self.positive && self.pred == TOP))
    }

    pub fn is_constant_truth(&self) -> bool {
        self.args.is_empty() && (self.pred == TOP || self.pred == BOTTOM)
    }

    pub fn dual(&self) -> Result<Literal, TermError> {
        if self.is_constant_truth() {
            return Err(TermError::NoDual(self.to_string()));
        }
        Ok(self.flipped())
    }

    /// Polarity flip without the verum/falsum guard.
    pub(crate) fn flipped(&self) -> Literal {
        Literal { pred: self.pred.clone(), positive: !self.positive, args: self.args.clone() }
    }

    /// Same predicate and arguments, ignoring polarity.
    pub fn same_atom(&self, other: &Literal) -> bool {
        self.pred == other.pred && self.args == other.args
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn apply(&self, s: &Substitution) -> Literal {
        s.apply_literal(self)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A disjunction of literals, kept as a multiset in construction order.
///
/// Normal form: falsum members are dropped, any verum member collapses the
/// clause to the single literal `$true`, and the empty clause stands for ⊥.
/// Duplicate literals are kept: removing them is the job of factoring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Normalizes `raw` into a clause.
    pub fn new(raw: Vec<Literal>) -> Clause {
        if raw.iter().any(Literal::is_top) {
            return Clause { lits: vec![Literal::top()] };
        }
        Clause { lits: raw.into_iter().filter(|l| !l.is_bottom()).collect() }
    }

    pub fn bottom() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn top() -> Clause {
        Clause { lits: vec![Literal::top()] }
    }

    pub fn unit(l: Literal) -> Clause {
        Clause::new(vec![l])
    }

    pub fn is_bottom(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.lits.len() == 1 && self.lits[0].is_top()
    }

    pub fn as_unit(&self) -> Option<&Literal> {
        match self.lits.as_slice() {
            [l] if !l.is_top() => Some(l),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.lits.iter()
    }

    pub fn into_literals(self) -> Vec<Literal> {
        self.lits
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in &self.lits {
            l.args.iter().for_each(|a| a.collect_vars(&mut out));
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.lits.iter().all(Literal::is_ground)
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        s.apply_clause(self)
    }

    /// Multiset equality ignoring literal order (no renaming).
    pub fn same_multiset(&self, other: &Clause) -> bool {
        if self.lits.len() != other.lits.len() {
            return false;
        }
        let mut a = self.lits.clone();
        let mut b = other.lits.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Equality modulo literal order and a bijective variable renaming.
    pub fn is_variant(&self, other: &Clause) -> bool {
        variant_renaming(self, other).is_some()
    }

    /// A canonical representative modulo literal order and variable names:
    /// literals are sorted by shape, then variables are numbered by first
    /// occurrence. Clauses with equal canonical forms are variants; the
    /// converse holds except for clauses with variable-symmetric duplicates.
    pub fn canonical(&self) -> Clause {
        let skeleton = |l: &Literal| {
            let mut erased = l.clone();
            erased.args = l.args.iter().map(erase_vars).collect();
            erased
        };
        let mut lits = self.lits.clone();
        lits.sort_by_key(|l| skeleton(l));
        let mut order = Vec::new();
        for l in &lits {
            l.args.iter().for_each(|a| a.vars_in_order(&mut order));
        }
        let renaming: Substitution =
            order.iter().enumerate().map(|(i, v)| (v.clone(), Term::Var(Var(format!("V{i}"))))).collect();
        let mut out: Vec<Literal> = lits.iter().map(|l| renaming.apply_literal(l)).collect();
        out.sort();
        Clause { lits: out }
    }
}

fn erase_vars(t: &Term) -> Term {
    match t {
        Term::Var(_) => Term::Var(Var::new("_")),
        Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(erase_vars).collect()),
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str(BOTTOM);
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter.into_iter().collect())
    }
}

/// Finds a bijective variable renaming `r` with `a·r` equal to `b` as multisets.
pub fn variant_renaming(a: &Clause, b: &Clause) -> Option<Substitution> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    if match_variant(a.literals(), b.literals(), 0, &mut used, &mut fwd, &mut bwd) {
        Some(fwd.into_iter().map(|(k, v)| (k, Term::Var(v))).collect())
    } else {
        None
    }
}

/// Bijective renaming between two literals, if one exists.
pub fn literal_variant(a: &Literal, b: &Literal) -> Option<Substitution> {
    variant_renaming(&Clause { lits: vec![a.clone()] }, &Clause { lits: vec![b.clone()] })
}

fn match_variant(
    a: &[Literal],
    b: &[Literal],
    i: usize,
    used: &mut [bool],
    fwd: &mut BTreeMap<Var, Var>,
    bwd: &mut BTreeMap<Var, Var>,
) -> bool {
    if i == a.len() {
        return true;
    }
    for j in 0..b.len() {
        if used[j] || a[i].pred != b[j].pred || a[i].positive != b[j].positive {
            continue;
        }
        let (f0, b0) = (fwd.clone(), bwd.clone());
        let ok = a[i].args.iter().zip(&b[j].args).all(|(s, t)| rename_match(s, t, fwd, bwd))
            && a[i].args.len() == b[j].args.len();
        if ok {
            used[j] = true;
            if match_variant(a, b, i + 1, used, fwd, bwd) {
                return true;
            }
            used[j] = false;
        }
        *fwd = f0;
        *bwd = b0;
    }
    false
}

fn rename_match(s: &Term, t: &Term, fwd: &mut BTreeMap<Var, Var>, bwd: &mut BTreeMap<Var, Var>) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => match (fwd.get(x), bwd.get(y)) {
            (None, None) => {
                fwd.insert(x.clone(), y.clone());
                bwd.insert(y.clone(), x.clone());
                true
            }
            (Some(y2), Some(x2)) => y2 == y && x2 == x,
            _ => false,
        },
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| rename_match(a, b, fwd, bwd))
        }
        _ => false,
    }
}

/// Source of fresh variable names, monotone within one derivation.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    counter: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    /// A fresh variable derived from `base` that is not in `avoid`.
    pub fn fresh(&mut self, base: &Var, avoid: &dyn Fn(&Var) -> bool) -> Var {
        loop {
            self.counter += 1;
            let v = Var(format!("{}.{}", base.base(), self.counter));
            if !avoid(&v) {
                return v;
            }
        }
    }
}

/// Renames the variables of `c` that occur in `avoid`, returning the renamed
/// clause and the renaming applied.
pub fn rename_apart(c: &Clause, avoid: &BTreeSet<Var>, fresh: &mut FreshVars) -> (Clause, Substitution) {
    let vars = c.vars();
    let mut renaming = Substitution::new();
    for v in vars.iter().filter(|v| avoid.contains(v)) {
        let nv = fresh.fresh(v, &|w| avoid.contains(w) || vars.contains(w));
        renaming.insert(v.clone(), Term::Var(nv));
    }
    (renaming.apply_clause(c), renaming)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Literal {
        Literal::pos("p", args)
    }

    #[test]
    fn dual_flips_and_is_involutive() {
        let l = p(vec![Term::constant("a")]);
        assert_eq!(l.dual().unwrap(), Literal::neg("p", vec![Term::constant("a")]));
        let q = Literal::neg("q", vec![]);
        assert_eq!(q.dual().unwrap(), Literal::pos("q", vec![]));
        let x = p(vec![Term::var("X")]);
        assert_eq!(x.dual().unwrap().dual().unwrap(), x);
        assert!(Literal::top().dual().is_err());
        assert!(Literal::bottom().dual().is_err());
    }

    #[test]
    fn normalization_laws() {
        let pl = Literal::pos("p", vec![]);
        assert_eq!(Clause::new(vec![pl.clone(), Literal::bottom()]), Clause::new(vec![pl.clone()]));
        assert!(Clause::new(vec![pl.clone(), Literal::top()]).is_top());
        assert!(Clause::new(vec![]).is_bottom());
        assert_eq!(Clause::new(vec![pl.clone(), pl.clone()]).len(), 2);
        assert_eq!(Clause::bottom().to_string(), "$false");
        // ~$true is falsum
        assert!(Clause::new(vec![Literal::neg(TOP, vec![])]).is_bottom());
    }

    #[test]
    fn rename_apart_examples() {
        let c = Clause::new(vec![p(vec![Term::var("X")]), Literal::pos("q", vec![Term::var("Y")])]);
        let avoid: BTreeSet<Var> = [Var::new("X")].into_iter().collect();
        let mut fresh = FreshVars::new();
        let (r, s) = rename_apart(&c, &avoid, &mut fresh);
        assert_eq!(s.len(), 1);
        assert!(r.vars().contains(&Var::new("Y")));
        assert!(!r.vars().contains(&Var::new("X")));
        assert!(r.is_variant(&c));

        let g = Clause::new(vec![p(vec![Term::constant("a")])]);
        let (r, s) = rename_apart(&g, &avoid, &mut fresh);
        assert_eq!(r, g);
        assert!(s.is_empty());

        let t = Clause::new(vec![p(vec![Term::var("X")]), Literal::neg("p", vec![Term::var("X")])]);
        let (r, _) = rename_apart(&t, &avoid, &mut fresh);
        assert_eq!(r.literals()[0].args, r.literals()[1].args);
        assert_eq!(r.vars().len(), 1);
    }

    #[test]
    fn variants() {
        let c1 = Clause::new(vec![p(vec![Term::var("X"), Term::var("Y")]), Literal::pos("q", vec![Term::var("X")])]);
        let c2 = Clause::new(vec![Literal::pos("q", vec![Term::var("B")]), p(vec![Term::var("B"), Term::var("A")])]);
        let c3 = Clause::new(vec![Literal::pos("q", vec![Term::var("B")]), p(vec![Term::var("A"), Term::var("B")])]);
        assert!(c1.is_variant(&c2));
        assert!(!c1.is_variant(&c3));
        assert_eq!(c1.canonical(), c2.canonical());
        let c4 = Clause::new(vec![p(vec![Term::var("X"), Term::var("X")])]);
        let c5 = Clause::new(vec![p(vec![Term::var("X"), Term::var("Y")])]);
        assert!(!c4.is_variant(&c5));
    }

    #[test]
    fn var_base_strips_suffix() {
        assert_eq!(Var::new("X.12").base(), "X");
        assert_eq!(Var::new("X").base(), "X");
        assert_eq!(Var::new("X.").base(), "X.");
    }
}
