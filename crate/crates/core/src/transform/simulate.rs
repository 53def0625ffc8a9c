//! Resolution proofs replayed in CR, one gadget per inference.

use std::ops::Range;

use super::TransformError;
use crate::cr::{CrDerivation, CrRule, NodeId};
use crate::resolution::{check_resolution, ResDerivation, ResRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    Input,
    Resolution,
    Factoring,
}

/// The CR nodes created for one resolution node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub nodes: Range<NodeId>,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub cr: CrDerivation,
    /// CR node concluding each resolution node's clause.
    pub map: Vec<NodeId>,
    pub gadgets: Vec<Gadget>,
}

/// Translates a checked resolution derivation into CR. Each resolution of
/// `Γ∨ℓ` with `ℓ̄'∨Δ` becomes: decisions of the duals of the side literals,
/// one UPR per side (skipped when the side is empty), a conflict, and a CL
/// discharging every decision of the gadget. Factoring uses the kernel's
/// factoring expansion.
pub fn resolution_to_cr(res: &ResDerivation) -> Result<Simulation, TransformError> {
    let report = check_resolution(res);
    if !report.is_ok() {
        return Err(TransformError::Unchecked(report.violations));
    }
    let mut cr = CrDerivation::new();
    let mut map = Vec::with_capacity(res.len());
    let mut gadgets = Vec::with_capacity(res.len());
    for node in res.nodes() {
        let start = cr.len();
        let (kind, id) = match &node.rule {
            ResRule::Input => (GadgetKind::Input, cr.add_input(&node.conclusion)),
            ResRule::Factoring { premise, positions, .. } => {
                (GadgetKind::Factoring, cr.factor(map[*premise], positions)?)
            }
            ResRule::Resolution { left, right, lpos, rpos, .. } => {
                let mut decisions = Vec::new();
                let mut side = |cr: &mut CrDerivation, premise: NodeId, pos: usize| -> Result<NodeId, TransformError> {
                    let c = cr.conclusion(premise).clone();
                    let mut units = Vec::new();
                    let mut assoc = Vec::new();
                    for (i, l) in c.iter().enumerate().filter(|(i, _)| *i != pos) {
                        let d = cr.decide(&l.flipped())?;
                        units.push(d);
                        assoc.push(i);
                        decisions.push(d);
                    }
                    if units.is_empty() {
                        Ok(premise)
                    } else {
                        Ok(cr.upr_with(&units, premise, &assoc)?)
                    }
                };
                let l = side(&mut cr, map[*left], *lpos)?;
                let r = side(&mut cr, map[*right], *rpos)?;
                let bottom = cr.conflict(l, r)?;
                (GadgetKind::Resolution, cr.learn(bottom, &decisions)?)
            }
        };
        map.push(id);
        gadgets.push(Gadget { kind, nodes: start..cr.len() });
    }
    Ok(Simulation { cr, map, gadgets })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationMetrics {
    /// Resolution inferences in the source proof.
    pub n: usize,
    /// Factoring inferences in the source proof.
    pub m: usize,
    /// Literals in conclusions of resolution inferences.
    pub n_prime: usize,
    /// Literals in conclusions of factoring inferences.
    pub m_prime: usize,
    /// CL inferences created for resolutions.
    pub learned: usize,
    /// Conflict inferences created for resolutions.
    pub conflicts: usize,
    /// UPR inferences created for resolutions, as actually built.
    pub propagations: usize,
    /// Decision literals created for resolutions.
    pub decision_literals: usize,
    /// `learned + conflicts + m + 2`, counting each factoring expansion once
    /// and the propagations as the closed form does.
    pub length_cr: usize,
    pub length_formula: usize,
    /// Literals in CL conclusions + conflict premises + decisions of the
    /// resolution gadgets, plus literals of factoring conclusions.
    pub size_cr: usize,
    pub size_formula: usize,
}

impl SimulationMetrics {
    /// Signed gap between the measured size and the closed form.
    pub fn size_gap(&self) -> i64 {
        self.size_cr as i64 - self.size_formula as i64
    }
}

/// Counts the source and target proofs. The length identity
/// `2n + m + 2` is enforced; the size closed form is reported next to the
/// measured size without being enforced (they differ by `n`).
pub fn simulation_metrics(res: &ResDerivation, sim: &Simulation) -> Result<SimulationMetrics, TransformError> {
    let mut m = SimulationMetrics::default();
    for node in res.nodes() {
        match node.rule {
            ResRule::Resolution { .. } => {
                m.n += 1;
                m.n_prime += node.conclusion.len();
            }
            ResRule::Factoring { .. } => {
                m.m += 1;
                m.m_prime += node.conclusion.len();
            }
            ResRule::Input => {}
        }
    }
    if m.n == 0 {
        return Ok(SimulationMetrics::default());
    }
    let mut factor_macros = 0;
    let mut cl_literals = 0;
    let mut conflict_premise_literals = 0;
    for g in &sim.gadgets {
        match g.kind {
            GadgetKind::Factoring => factor_macros += 1,
            GadgetKind::Resolution => {
                for id in g.nodes.clone() {
                    let node = sim.cr.node(id);
                    match &node.rule {
                        CrRule::Learn { .. } => {
                            m.learned += 1;
                            cl_literals += node.conclusion.len();
                        }
                        CrRule::Conflict { left, right, .. } => {
                            m.conflicts += 1;
                            conflict_premise_literals +=
                                sim.cr.conclusion(*left).len() + sim.cr.conclusion(*right).len();
                        }
                        CrRule::Upr { .. } => m.propagations += 1,
                        CrRule::Decision { .. } => m.decision_literals += 1,
                        CrRule::Input => {}
                    }
                }
            }
            GadgetKind::Input => {}
        }
    }
    for (what, expected, found) in [
        ("clause learning inferences", m.n, m.learned),
        ("conflict inferences", m.n, m.conflicts),
        ("factoring expansions", m.m, factor_macros),
    ] {
        if expected != found {
            return Err(TransformError::MetricMismatch { what, expected, found });
        }
    }
    m.length_cr = m.learned + m.conflicts + factor_macros + 2;
    m.length_formula = 2 * m.n + m.m + 2;
    if m.length_cr != m.length_formula {
        return Err(TransformError::MetricMismatch { what: "length", expected: m.length_formula, found: m.length_cr });
    }
    m.size_cr = cl_literals + conflict_premise_literals + m.decision_literals + m.m_prime;
    m.size_formula = 2 * m.n_prime + 3 * m.n + m.m_prime;
    Ok(m)
}
