//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use conflict_resolution::cr::CrDerivation;
use conflict_resolution::resolution::ResDerivation;
use conflict_resolution::search::{solve, SolverOptions, Verdict};
use conflict_resolution::{Clause, Literal, Term, Var};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn lit(positive: bool, pred: &str, args: Vec<Term>) -> Literal {
    Literal::new(positive, pred, args)
}

fn atom_of(l: &Literal) -> Literal {
    Literal { positive: true, ..l.clone() }
}

/// Ground clauses as (positive, negative) bitmasks over an atom index.
fn encode(clauses: &[Clause]) -> (Vec<(u64, u64)>, usize) {
    let mut index: BTreeMap<Literal, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for c in clauses {
        let (mut pos, mut neg) = (0u64, 0u64);
        for l in c.iter() {
            assert!(l.is_ground(), "oracle needs ground clauses");
            let n = index.len();
            let i = *index.entry(atom_of(l)).or_insert(n);
            assert!(i < 64, "too many atoms for the oracle");
            if l.positive {
                pos |= 1 << i;
            } else {
                neg |= 1 << i;
            }
        }
        out.push((pos, neg));
    }
    (out, index.len())
}

/// Truth-table satisfiability of ground clauses.
pub fn truth_table_sat(clauses: &[Clause]) -> bool {
    let (masks, n) = encode(clauses);
    assert!(n <= 24, "truth table over {n} atoms");
    (0u64..1 << n).any(|a| masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0))
}

fn constants(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Const(c) => {
            out.insert(c.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| constants(a, out)),
        Term::Var(_) => {}
    }
}

/// All ground instances of function-free clauses over their constants (one
/// invented constant if there are none).
pub fn herbrand_ground(clauses: &[Clause]) -> Vec<Clause> {
    let mut consts = BTreeSet::new();
    for c in clauses {
        for l in c.iter() {
            l.args.iter().for_each(|t| constants(t, &mut consts));
        }
    }
    if consts.is_empty() {
        consts.insert("c0".to_string());
    }
    let consts: Vec<String> = consts.into_iter().collect();
    let mut out = Vec::new();
    for c in clauses {
        let vars: Vec<Var> = c.vars().into_iter().collect();
        let total = consts.len().pow(vars.len() as u32);
        for mut k in 0..total {
            let mut s = conflict_resolution::Substitution::new();
            for v in &vars {
                s.insert(v.clone(), Term::constant(&consts[k % consts.len()]));
                k /= consts.len();
            }
            out.push(s.apply_clause(c));
        }
    }
    out
}

/// Satisfiability of a function-free clause set by grounding.
pub fn herbrand_sat(clauses: &[Clause]) -> bool {
    truth_table_sat(&herbrand_ground(clauses))
}

/// Random ground CNF over `p0 … p{atoms-1}`.
pub fn random_ground_cnf(rng: &mut StdRng, max_atoms: usize, max_clauses: usize) -> Vec<Clause> {
    let atoms = rng.gen_range(3.min(max_atoms)..=max_atoms);
    let n = rng.gen_range(1..=max_clauses);
    (0..n)
        .map(|_| {
            let len = if rng.gen_bool(0.05) { 1 } else { rng.gen_range(2..=3) }.min(atoms);
            let mut picked: Vec<usize> = (0..atoms).collect();
            picked.shuffle(rng);
            Clause::new(picked[..len].iter().map(|&a| lit(rng.gen_bool(0.5), &format!("p{a}"), vec![])).collect())
        })
        .collect()
}

/// Random function-free problem: up to three constants, up to two
/// predicates of arity at most two.
pub fn random_bs_problem(rng: &mut StdRng) -> Vec<Clause> {
    let consts = ["a", "b", "c"];
    let nconst = rng.gen_range(1..=3);
    let preds: Vec<(String, usize)> =
        (0..rng.gen_range(1..=2)).map(|i| (["p", "q"][i].to_string(), rng.gen_range(0..=2))).collect();
    let vars = ["X", "Y", "Z"];
    let n = rng.gen_range(2..=7);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            Clause::new(
                (0..len)
                    .map(|_| {
                        let (p, arity) = &preds[rng.gen_range(0..preds.len())];
                        let args = (0..*arity)
                            .map(|_| {
                                if rng.gen_bool(0.5) {
                                    Term::var(vars[rng.gen_range(0..vars.len())])
                                } else {
                                    Term::constant(consts[rng.gen_range(0..nconst)])
                                }
                            })
                            .collect();
                        lit(rng.gen_bool(0.5), p, args)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// A ground resolution refutation generated from the empty clause upwards,
/// with the numbers of resolutions and factorings it was built with.
pub struct GeneratedRefutation {
    pub proof: ResDerivation,
    pub resolutions: usize,
    pub factorings: usize,
}

struct RefGen<'a> {
    rng: &'a mut StdRng,
    res_left: usize,
    fac_left: usize,
    atoms: Vec<Literal>,
    proof: ResDerivation,
    resolutions: usize,
    factorings: usize,
}

impl RefGen<'_> {
    /// Builds a node whose conclusion is `target` as a multiset.
    fn build(&mut self, target: Vec<Literal>, force: bool) -> usize {
        if !target.is_empty() && self.fac_left > 0 && self.rng.gen_bool(0.3) {
            self.fac_left -= 1;
            self.factorings += 1;
            let l = target[self.rng.gen_range(0..target.len())].clone();
            let mut premise = target.clone();
            premise.insert(self.rng.gen_range(0..=premise.len()), l.clone());
            let p = self.build(premise, false);
            let c = self.proof.conclusion(p).clone();
            let at: Vec<usize> = c.iter().enumerate().filter(|(_, x)| **x == l).map(|(i, _)| i).take(2).collect();
            return self.proof.factor(p, &at).expect("duplicate literals factor");
        }
        if self.res_left > 0 && (force || self.rng.gen_bool(0.6)) {
            self.res_left -= 1;
            self.resolutions += 1;
            let atom = self.atoms[self.rng.gen_range(0..self.atoms.len())].clone();
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for l in target {
                if self.rng.gen_bool(0.5) {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            let flip = self.rng.gen_bool(0.5);
            let pivot = Literal { positive: flip, ..atom };
            left.insert(self.rng.gen_range(0..=left.len()), pivot.clone());
            right.insert(self.rng.gen_range(0..=right.len()), Literal { positive: !flip, ..pivot.clone() });
            let a = self.build(left, false);
            let b = self.build(right, false);
            let lpos = self.proof.conclusion(a).iter().position(|x| *x == pivot).unwrap();
            let rpos = self
                .proof
                .conclusion(b)
                .iter()
                .position(|x| x.same_atom(&pivot) && x.positive != pivot.positive)
                .unwrap();
            return self.proof.resolve(a, b, lpos, rpos).expect("complementary pivot");
        }
        self.proof.add_input(&Clause::new(target))
    }
}

pub fn random_resolution_refutation(rng: &mut StdRng, max_res: usize, max_fac: usize) -> GeneratedRefutation {
    let atoms = [
        lit(true, "p", vec![]),
        lit(true, "q", vec![]),
        lit(true, "r", vec![Term::constant("a")]),
        lit(true, "r", vec![Term::app("f", vec![Term::constant("b")])]),
        lit(true, "s", vec![Term::constant("a"), Term::constant("b")]),
    ];
    let res_left = rng.gen_range(1..=max_res);
    let fac_left = rng.gen_range(0..=max_fac);
    let mut g = RefGen {
        rng,
        res_left,
        fac_left,
        atoms: atoms.to_vec(),
        proof: ResDerivation::new(),
        resolutions: 0,
        factorings: 0,
    };
    g.build(Vec::new(), true);
    GeneratedRefutation { proof: g.proof, resolutions: g.resolutions, factorings: g.factorings }
}

/// A problem `S`, a clause with variable-disjoint components, and the
/// solver's refutation of each `S ∪ {Γi}`.
pub struct SplitInstance {
    pub side: Vec<Clause>,
    pub long: Clause,
    pub components: Vec<Clause>,
    pub proofs: Vec<CrDerivation>,
}

/// Builds components over fresh variables and a side set `S` that refutes
/// every component through ground instances of its literals' duals.
pub fn random_split_instance(rng: &mut StdRng, k: usize) -> SplitInstance {
    let consts = ["a", "b", "c"];
    let mut side = Vec::new();
    let mut components = Vec::new();
    let mut aux = 0;
    for i in 0..k {
        let x = Term::var(&format!("X{i}"));
        let y = Term::var(&format!("Y{i}"));
        let c = |rng: &mut StdRng| Term::constant(consts[rng.gen_range(0..consts.len())]);
        let comp = match rng.gen_range(0..4) {
            0 => vec![lit(rng.gen_bool(0.5), "p", vec![x.clone()])],
            1 => vec![lit(true, "p", vec![x.clone()]), lit(rng.gen_bool(0.5), "q", vec![x.clone(), y.clone()])],
            2 => vec![lit(false, "q", vec![x.clone(), c(rng)]), lit(true, "r", vec![x.clone()])],
            _ => vec![lit(true, "r", vec![c(rng)])],
        };
        let mut s = conflict_resolution::Substitution::new();
        s.insert(Var::new(format!("X{i}")), c(rng));
        s.insert(Var::new(format!("Y{i}")), c(rng));
        for l in &comp {
            let dual = s.apply_literal(l).dual().unwrap();
            if rng.gen_bool(0.5) {
                side.push(Clause::unit(dual));
            } else {
                let t = lit(true, &format!("t{aux}"), vec![]);
                aux += 1;
                side.push(Clause::new(vec![dual, t.clone()]));
                side.push(Clause::unit(t.dual().unwrap()));
            }
        }
        components.push(Clause::new(comp));
    }
    // a distractor that never helps
    side.push(Clause::new(vec![lit(true, "u", vec![Term::var("W")]), lit(true, "v", vec![])]));
    side.shuffle(rng);
    let long = Clause::new(components.iter().flat_map(|c| c.iter().cloned()).collect());
    let proofs = components
        .iter()
        .map(|g| {
            let mut problem = side.clone();
            problem.push(g.clone());
            match solve(&problem, &SolverOptions::default()).verdict {
                Verdict::Unsat(d) => d,
                v => panic!("component problem not refuted: {v:?}"),
            }
        })
        .collect();
    SplitInstance { side, long, components, proofs }
}
