//! CDCL-style proof search producing CR refutations.
//!
//! The solver keeps a trail of unit literals, each the conclusion of a
//! kernel node, grouped by decision level. Propagation is first-order and
//! semi-naive: every clause remembers how much of the trail it has been
//! combined with. On a conflict every open decision of the ⊥ node is
//! discharged by one CL inference and the solver backjumps to the second
//! highest level among them. Decisions below that level were discharged too,
//! so the kept levels are replayed with fresh decision nodes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::cr::{CrDerivation, CrRule, NodeId};
use crate::term::{is_instance, unify_atoms, unify_literals_into, Clause, Literal, Substitution, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_decisions: usize,
    pub max_propagations: usize,
    /// Propagated literals with deeper terms are discarded.
    pub max_term_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_decisions: 10_000, max_propagations: 200_000, max_term_depth: 6 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: usize,
    pub propagations: usize,
    pub conflicts: usize,
    pub learned: usize,
    pub backjumps: usize,
    /// Propagated literals dropped because they were instances of trail literals.
    pub subsumed: usize,
    /// Propagated literals dropped by the term-depth limit.
    pub too_deep: usize,
    /// Decisions made again after a backjump, included in `decisions`.
    pub replayed: usize,
    /// Reserved; the solver neither restarts nor deletes clauses.
    pub restarts: usize,
    pub deleted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    DecisionLimit,
    PropagationLimit,
    /// No conflict and nothing left to decide.
    Saturated,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnknownReason::DecisionLimit => "decision limit reached",
            UnknownReason::PropagationLimit => "propagation limit reached",
            UnknownReason::Saturated => "saturated without a conflict",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// A refutation whose last node is the final conflict.
    Unsat(CrDerivation),
    Unknown(UnknownReason),
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: Stats,
    /// Learned clauses in the order they were learned.
    pub learned: Vec<Clause>,
}

impl SolveResult {
    pub fn refutation(&self) -> Option<&CrDerivation> {
        match &self.verdict {
            Verdict::Unsat(d) => Some(d),
            Verdict::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    pub limits: Limits,
    /// Forced first decision.
    pub seed: Option<Literal>,
}

#[derive(Clone, Debug)]
struct Entry {
    node: NodeId,
    lit: Literal,
    level: usize,
}

#[derive(Clone, Debug)]
struct DbClause {
    node: NodeId,
    /// Trail prefix already combined with this clause.
    seen: usize,
}

enum Step {
    Conflict(NodeId),
    Limit(UnknownReason),
    Quiet,
}

struct Solver {
    d: CrDerivation,
    db: Vec<DbClause>,
    trail: Vec<Entry>,
    /// Trail index where each level starts; level `i + 1` starts at `levels[i]`.
    levels: Vec<usize>,
    learned: Vec<NodeId>,
    twins: HashMap<NodeId, Vec<NodeId>>,
    atoms: Vec<Literal>,
    opts: SolverOptions,
    seed_used: bool,
    /// Decisions to make again after a backjump, last one first.
    replay: Vec<Literal>,
    stats: Stats,
}

/// Searches for a CR refutation of `clauses`.
pub fn solve(clauses: &[Clause], opts: &SolverOptions) -> SolveResult {
    let mut s = Solver {
        d: CrDerivation::new(),
        db: Vec::new(),
        trail: Vec::new(),
        levels: Vec::new(),
        learned: Vec::new(),
        twins: HashMap::new(),
        atoms: herbrand_atoms(clauses, opts.limits.max_term_depth.min(2), 20_000),
        opts: opts.clone(),
        seed_used: false,
        replay: Vec::new(),
        stats: Stats::default(),
    };
    let verdict = s.run(clauses);
    let learned = s.learned.iter().map(|&n| s.d.conclusion(n).clone()).collect();
    SolveResult { verdict, stats: s.stats, learned }
}

impl Solver {
    fn level(&self) -> usize {
        self.levels.len()
    }

    fn run(&mut self, clauses: &[Clause]) -> Verdict {
        for c in clauses {
            if c.is_top() {
                continue;
            }
            let id = self.d.add_input(c);
            if c.is_bottom() {
                let (d, _) = self.d.prune(id);
                return Verdict::Unsat(d);
            }
            if let Some(b) = self.add_clause(id) {
                return self.finish(b);
            }
        }
        loop {
            match self.propagate() {
                Step::Limit(r) => return Verdict::Unknown(r),
                Step::Conflict(b) => {
                    if self.d.undischarged(b).is_empty() {
                        return self.finish(b);
                    }
                    if let Some(b) = self.learn_and_backjump(b) {
                        return self.finish(b);
                    }
                }
                Step::Quiet => {
                    if self.stats.decisions >= self.opts.limits.max_decisions {
                        return Verdict::Unknown(UnknownReason::DecisionLimit);
                    }
                    let Some(lit) = self.pick() else { return Verdict::Unknown(UnknownReason::Saturated) };
                    self.stats.decisions += 1;
                    self.levels.push(self.trail.len());
                    let id = self.d.decide(&lit).expect("decisions are proper literals");
                    if let Some(b) = self.push_entry(id) {
                        if let Some(b) = self.learn_and_backjump(b) {
                            return self.finish(b);
                        }
                    }
                }
            }
        }
    }

    fn finish(&self, bottom: NodeId) -> Verdict {
        let (d, _) = self.d.prune(bottom);
        Verdict::Unsat(d)
    }

    /// Registers a clause node; units go straight to the trail.
    fn add_clause(&mut self, id: NodeId) -> Option<NodeId> {
        if self.d.conclusion(id).len() == 1 {
            self.push_entry(id)
        } else {
            self.db.push(DbClause { node: id, seen: 0 });
            None
        }
    }

    /// Puts a unit node on the trail and returns a conflict node if it
    /// clashes with an earlier entry.
    fn push_entry(&mut self, node: NodeId) -> Option<NodeId> {
        let lit = self.d.node(node).unit().expect("trail nodes are units").clone();
        let clash = self
            .trail
            .iter()
            .find(|e| e.lit.pred == lit.pred && e.lit.positive != lit.positive && unify_atoms(&e.lit, &lit).is_ok())
            .map(|e| e.node);
        self.trail.push(Entry { node, lit, level: self.level() });
        clash.map(|other| {
            self.stats.conflicts += 1;
            self.d.conflict(other, node).expect("clash was unifiable")
        })
    }

    fn subsumed(&self, lit: &Literal) -> bool {
        self.trail.iter().any(|e| e.lit.positive == lit.positive && is_instance(lit, &e.lit))
    }

    fn propagate(&mut self) -> Step {
        loop {
            let mut progress = false;
            // breadth first: a sweep only uses entries present when it began
            let len = self.trail.len();
            for ci in 0..self.db.len() {
                let since = self.db[ci].seen;
                if since >= len {
                    continue;
                }
                self.db[ci].seen = len;
                let clause = self.d.conclusion(self.db[ci].node).clone();
                for combo in self.combinations(&clause, since, len) {
                    if combo.lit.depth() > self.opts.limits.max_term_depth {
                        self.stats.too_deep += 1;
                        continue;
                    }
                    if self.subsumed(&combo.lit) {
                        self.stats.subsumed += 1;
                        continue;
                    }
                    if self.stats.propagations >= self.opts.limits.max_propagations {
                        return Step::Limit(UnknownReason::PropagationLimit);
                    }
                    let Some(units) = self.premises(&combo.entries) else { continue };
                    let Ok(id) = self.d.upr_with(&units, self.db[ci].node, &combo.assoc) else { continue };
                    self.stats.propagations += 1;
                    progress = true;
                    if let Some(b) = self.push_entry(id) {
                        return Step::Conflict(b);
                    }
                }
            }
            if !progress {
                return Step::Quiet;
            }
        }
    }

    /// Unit premises for a combination; repeated non-ground trail nodes are
    /// replaced by renamed re-derivations so each use has its own variables.
    fn premises(&mut self, entries: &[usize]) -> Option<Vec<NodeId>> {
        let mut count: HashMap<NodeId, usize> = HashMap::new();
        let mut out = Vec::with_capacity(entries.len());
        for &e in entries {
            let node = self.trail[e].node;
            let k = count.entry(node).or_default();
            *k += 1;
            if *k == 1 || self.trail[e].lit.is_ground() {
                out.push(node);
            } else {
                out.push(self.twin(node, *k - 2)?);
            }
        }
        Some(out)
    }

    fn twin(&mut self, node: NodeId, k: usize) -> Option<NodeId> {
        while self.twins.get(&node).map_or(0, Vec::len) <= k {
            let n = self.d.node(node);
            let copy = match &n.rule {
                CrRule::Input => self.d.add_input(&n.conclusion.clone()),
                CrRule::Upr { units, clause, assoc, .. } => {
                    let (u, c, a) = (units.clone(), *clause, assoc.clone());
                    self.d.upr_with(&u, c, &a).ok()?
                }
                _ => return None,
            };
            self.twins.entry(node).or_default().push(copy);
        }
        Some(self.twins[&node][k])
    }

    /// Every way of resolving all but one literal of `clause` against trail
    /// entries `< len`, using at least one entry `>= since`.
    fn combinations(&self, clause: &Clause, since: usize, len: usize) -> Vec<Combo> {
        let lits = clause.literals();
        let mut out = Vec::new();
        for rest in 0..lits.len() {
            let assoc: Vec<usize> = (0..lits.len()).filter(|&i| i != rest).collect();
            let cands: Vec<Vec<usize>> = assoc
                .iter()
                .map(|&i| {
                    let c = &lits[i];
                    (0..len)
                        .filter(|&e| {
                            let l = &self.trail[e].lit;
                            l.pred == c.pred && l.positive != c.positive && l.args.len() == c.args.len()
                        })
                        .collect()
                })
                .collect();
            if cands.iter().any(Vec::is_empty) || !cands.iter().any(|c| c.iter().any(|&e| e >= since)) {
                continue;
            }
            let mut chosen = Vec::with_capacity(assoc.len());
            self.extend(lits, &assoc, &cands, since, Substitution::new(), &mut chosen, &mut |s, chosen| {
                out.push(Combo { entries: chosen.to_vec(), assoc: assoc.clone(), lit: s.apply_literal(&lits[rest]) });
            });
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        lits: &[Literal],
        assoc: &[usize],
        cands: &[Vec<usize>],
        since: usize,
        s: Substitution,
        chosen: &mut Vec<usize>,
        emit: &mut dyn FnMut(&Substitution, &[usize]),
    ) {
        let k = chosen.len();
        if k == assoc.len() {
            if chosen.iter().any(|&e| e >= since) {
                emit(&s, chosen);
            }
            return;
        }
        let clause_lit = lits[assoc[k]].flipped();
        for &e in &cands[k] {
            let repeat = chosen.iter().filter(|&&x| x == e).count();
            let unit = if repeat == 0 { self.trail[e].lit.clone() } else { suffixed(&self.trail[e].lit, repeat) };
            let mut s2 = s.clone();
            if unify_literals_into(&mut s2, &unit, &clause_lit).is_ok() {
                chosen.push(e);
                self.extend(lits, assoc, cands, since, s2, chosen, emit);
                chosen.pop();
            }
        }
    }

    /// Discharges every open decision of `bottom`, backjumps, and adds the
    /// learned clause. Returns a level-0 conflict if one follows at once.
    fn learn_and_backjump(&mut self, bottom: NodeId) -> Option<NodeId> {
        let open: Vec<NodeId> = self.d.undischarged(bottom).iter().copied().collect();
        let level_of = |n: NodeId| self.trail.iter().find(|e| e.node == n).map_or(0, |e| e.level);
        let mut levels: Vec<usize> = open.iter().map(|&n| level_of(n)).collect();
        levels.sort_unstable();
        let target = if levels.len() >= 2 { levels[levels.len() - 2] } else { 0 };
        let cl = self.d.learn(bottom, &open).expect("open decisions are dischargeable");
        self.stats.learned += 1;
        self.learned.push(cl);
        // every decision up to the target level is now discharged, and a CR
        // decision is discharged once, so those levels are rebuilt with fresh
        // decisions of the same literals
        let cut = self.levels.get(target).copied().unwrap_or(self.trail.len());
        self.replay = self.trail[..cut]
            .iter()
            .filter(|e| matches!(self.d.node(e.node).rule, CrRule::Decision { .. }))
            .map(|e| e.lit.clone())
            .rev()
            .collect();
        self.backjump(0);
        self.add_clause(cl)
    }

    fn backjump(&mut self, level: usize) {
        if level < self.level() {
            self.stats.backjumps += 1;
            let cut = self.levels[level];
            self.levels.truncate(level);
            self.trail.truncate(cut);
        }
        // combinations skipped as instances of popped entries must be redone
        for c in &mut self.db {
            c.seen = 0;
        }
    }

    fn assigned(&self, lit: &Literal) -> bool {
        self.subsumed(lit) || self.subsumed(&lit.flipped())
    }

    /// Replayed decisions first, then the seed, then the least open ground literal of the most recently
    /// learned clause that is not yet satisfied, then the least unassigned
    /// ground atom, decided positively.
    fn pick(&mut self) -> Option<Literal> {
        while let Some(l) = self.replay.pop() {
            if !self.assigned(&l) {
                self.stats.replayed += 1;
                return Some(l);
            }
        }
        if !self.seed_used {
            self.seed_used = true;
            if let Some(seed) = self.opts.seed.clone() {
                if !self.assigned(&seed) {
                    return Some(seed);
                }
            }
        }
        for &n in self.learned.iter().rev() {
            let c = self.d.conclusion(n);
            if c.iter().any(|l| self.subsumed(l)) {
                continue;
            }
            let open = c.iter().filter(|l| l.is_ground() && !self.assigned(l));
            if let Some(l) = open.min_by_key(|l| (l.depth(), l.to_string())) {
                return Some(l.clone());
            }
        }
        self.atoms.iter().find(|a| !self.assigned(a)).cloned()
    }
}

struct Combo {
    entries: Vec<usize>,
    assoc: Vec<usize>,
    lit: Literal,
}

/// `l` with every variable renamed by a suffix that cannot occur in parsed input.
fn suffixed(l: &Literal, k: usize) -> Literal {
    let s: Substitution = l.vars().into_iter().map(|v| (v.clone(), Term::Var(Var(format!("{}#{k}", v.0))))).collect();
    s.apply_literal(l)
}

/// Ground atoms over the Herbrand universe of `clauses` up to `depth`
/// function nestings, at most `cap` of them, ordered by depth and then text.
pub fn herbrand_atoms(clauses: &[Clause], depth: usize, cap: usize) -> Vec<Literal> {
    let mut preds: BTreeMap<String, usize> = BTreeMap::new();
    let mut funs: BTreeMap<String, usize> = BTreeMap::new();
    for c in clauses {
        for l in c.iter() {
            preds.entry(l.pred.clone()).or_insert(l.args.len());
            l.args.iter().for_each(|t| t.collect_functions(&mut funs));
        }
    }
    let mut universe: Vec<Term> = funs.iter().filter(|(_, &a)| a == 0).map(|(c, _)| Term::constant(c)).collect();
    if universe.is_empty() {
        let mut k = 0;
        while funs.contains_key(&format!("c{k}")) {
            k += 1;
        }
        universe.push(Term::constant(&format!("c{k}")));
    }
    let functions: Vec<(&String, usize)> = funs.iter().filter(|(_, &a)| a > 0).map(|(f, &a)| (f, a)).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (f, arity) in &functions {
            for args in tuples(&universe, *arity, cap) {
                let t = Term::app(f, args);
                if !universe.contains(&t) && !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        universe.extend(next);
        if universe.len() >= cap {
            break;
        }
    }
    let mut atoms = Vec::new();
    for (p, &arity) in &preds {
        for args in tuples(&universe, arity, cap) {
            atoms.push(Literal::pos(p, args));
        }
    }
    atoms.sort_by_cached_key(|a| (a.depth(), a.to_string()));
    atoms.truncate(cap);
    atoms
}

fn tuples(universe: &[Term], arity: usize, cap: usize) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        'outer: for t in &out {
            for u in universe {
                let mut v = t.clone();
                v.push(u.clone());
                next.push(v);
                if next.len() >= cap {
                    break 'outer;
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests;
