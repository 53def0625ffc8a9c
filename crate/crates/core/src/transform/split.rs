//! Splitting a clause into variable-disjoint components and combining the
//! component refutations into one CR refutation.

use std::collections::{BTreeSet, HashMap};

use super::TransformError;
use crate::cr::{check_derivation, CrDerivation, CrKind, CrRule, NodeId};
use crate::term::{Clause, Term, Var};

/// Connected components of the shares-a-variable relation between the
/// literals of `c`, ordered by their first literal. Ground literals are
/// components of their own.
pub fn split_components(c: &Clause) -> Vec<Clause> {
    let lits = c.literals();
    let mut parent: Vec<usize> = (0..lits.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let vars: Vec<BTreeSet<Var>> = lits.iter().map(|l| l.vars()).collect();
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            if !vars[i].is_disjoint(&vars[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<crate::term::Literal>)> = Vec::new();
    for (i, l) in lits.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(l.clone()),
            None => groups.push((root, vec![l.clone()])),
        }
    }
    groups.into_iter().map(|(_, g)| Clause::new(g)).collect()
}

/// Key identifying a clause up to variable names, keeping literal order.
fn ordered_key(c: &Clause) -> String {
    let mut order = Vec::new();
    for l in c.iter() {
        l.args.iter().for_each(|t| t.vars_in_order(&mut order));
    }
    let mut seen = Vec::new();
    for v in order {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    let r: crate::term::Substitution =
        seen.into_iter().enumerate().map(|(i, v)| (v, Term::Var(Var(format!("V{i}"))))).collect();
    r.apply_clause(c).to_string()
}

/// Combines refutations `proofs[i]` of `S ∪ {components[i]}` into a
/// refutation of `S ∪ {Γ1 ∨ … ∨ Γk}`.
///
/// Stage 1 decides the duals of every literal of `Γ2 … Γk` once. A unit `Γ1`
/// is replaced by one shared UPR of those decisions against the long clause;
/// for a longer `Γ1`, each UPR using it as clause premise is redone against
/// the long clause with the decisions as extra units. Stage `i ≥ 2` replaces
/// every `Γi` leaf by one CL over the previous stage's ⊥ discharging the
/// decisions of `Γi`. Input clauses of `S` are shared between stages.
pub fn combine_split_refutations(
    components: &[Clause],
    proofs: &[CrDerivation],
) -> Result<CrDerivation, TransformError> {
    if components.len() != proofs.len() || components.is_empty() {
        return Err(TransformError::ComponentMismatch { components: components.len(), proofs: proofs.len() });
    }
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            if !components[i].vars().is_disjoint(&components[j].vars()) {
                return Err(TransformError::NotDisjoint(i, j));
            }
        }
    }
    for (i, p) in proofs.iter().enumerate() {
        let report = check_derivation(p);
        if report.kind != CrKind::Refutation || !report.is_ok() {
            return Err(TransformError::NotRefutation(i));
        }
    }
    if components.len() == 1 {
        return Ok(proofs[0].clone());
    }
    let long = Clause::new(components.iter().flat_map(|c| c.literals().iter().cloned()).collect());
    let keys: Vec<String> = components.iter().map(ordered_key).collect();
    let mut out = CrDerivation::new();
    let mut shared: HashMap<String, NodeId> = HashMap::new();
    let long_node = out.add_input(&long);
    shared.insert(ordered_key(&long), long_node);

    // stage decisions, per component i ≥ 1, and their positions in the long clause
    let mut stage: Vec<Vec<NodeId>> = vec![Vec::new(); components.len()];
    let mut positions = Vec::new();
    let mut pos = components[0].len();
    for (i, c) in components.iter().enumerate().skip(1) {
        for l in c.iter() {
            stage[i].push(out.decide(&l.flipped())?);
            positions.push(pos);
            pos += 1;
        }
    }
    let all_stage: Vec<NodeId> = stage.iter().flatten().copied().collect();

    let first_unit = components[0].len() == 1;
    let mut first_leaf: Option<NodeId> = None;
    let gamma1 = |out: &mut CrDerivation, first_leaf: &mut Option<NodeId>| -> Result<NodeId, TransformError> {
        if let Some(n) = *first_leaf {
            return Ok(n);
        }
        let n = out.upr_with(&all_stage, long_node, &positions)?;
        *first_leaf = Some(n);
        Ok(n)
    };

    let mut bottom = replay(&proofs[0], &mut out, &mut shared, |out, node, rule, map| {
        let is_leaf = |id: NodeId| {
            matches!(proofs[0].node(id).rule, CrRule::Input) && ordered_key(proofs[0].conclusion(id)) == keys[0]
        };
        match rule {
            CrRule::Input if is_leaf(node) => {
                if first_unit {
                    Ok(Some(gamma1(out, &mut first_leaf)?))
                } else {
                    // only reachable as a clause premise; handled at the UPR
                    Ok(Some(usize::MAX))
                }
            }
            CrRule::Upr { units, clause, assoc, .. } if !first_unit && is_leaf(*clause) => {
                let mut u: Vec<NodeId> = units.iter().map(|&x| map[x]).collect();
                u.extend(all_stage.iter().copied());
                let mut a = assoc.clone();
                a.extend(positions.iter().copied());
                Ok(Some(out.upr_with(&u, long_node, &a)?))
            }
            _ => Ok(None),
        }
    })?;

    for i in 1..components.len() {
        let open = out.undischarged(bottom).clone();
        let pending: Vec<NodeId> = stage[i].iter().copied().filter(|d| open.contains(d)).collect();
        if pending.is_empty() {
            // the previous stage never used the long clause
            break;
        }
        let cl = out.learn(bottom, &pending)?;
        bottom = replay(&proofs[i], &mut out, &mut shared, |_, node, rule, _| {
            let leaf = matches!(rule, CrRule::Input) && ordered_key(proofs[i].conclusion(node)) == keys[i];
            Ok(leaf.then_some(cl))
        })?;
    }
    let (pruned, _) = out.prune(bottom);
    Ok(pruned)
}

/// Replays `src` into `out` rule by rule; `hook` may supply a node instead.
/// Input clauses are shared through `shared`. Returns the image of the sink.
fn replay(
    src: &CrDerivation,
    out: &mut CrDerivation,
    shared: &mut HashMap<String, NodeId>,
    mut hook: impl FnMut(&mut CrDerivation, NodeId, &CrRule, &[NodeId]) -> Result<Option<NodeId>, TransformError>,
) -> Result<NodeId, TransformError> {
    let mut map: Vec<NodeId> = Vec::with_capacity(src.len());
    for (i, node) in src.nodes().iter().enumerate() {
        if let Some(id) = hook(out, i, &node.rule, &map)? {
            map.push(id);
            continue;
        }
        let id = match &node.rule {
            CrRule::Input => {
                let key = ordered_key(&node.conclusion);
                match shared.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = out.add_input(&node.conclusion);
                        shared.insert(key, id);
                        id
                    }
                }
            }
            CrRule::Decision { .. } => out.decide(node.unit().expect("decision literal"))?,
            CrRule::Upr { units, clause, assoc, .. } => {
                let u: Vec<NodeId> = units.iter().map(|&x| map[x]).collect();
                out.upr_with(&u, map[*clause], assoc)?
            }
            CrRule::Conflict { left, right, .. } => out.conflict(map[*left], map[*right])?,
            CrRule::Learn { bottom, discharged, .. } => {
                let groups = discharged.iter().map(|g| g.iter().map(|&d| map[d]).collect()).collect();
                out.learn_grouped(map[*bottom], groups)?
            }
        };
        map.push(id);
    }
    Ok(*map.last().expect("refutations are nonempty"))
}
