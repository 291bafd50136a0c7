//! Turning a finished phase into a partial Steiner tree with fewer non-root
//! components.
//!
//! The tight arc `uv` is bought together with one path per absorbing moat
//! (from `v` back to that moat's head, read off the parent pointers) and, if
//! `u` is a virtual node, the mate arc `wu`. Every bought path costs
//! `Δ - ε` for a slack `ε >= 0`, and the slacks together cover `c_uv`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{reachable, ArcId, Instance, NodeId};
use crate::moat::PhaseOutcome;
use crate::partial_tree::PartialSteinerTree;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoatPath {
    /// Non-root component whose moat holds the head of the tight arc.
    pub component: usize,
    /// Arcs from the tight arc's head to the component head.
    pub arcs: Vec<ArcId>,
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentPlan {
    pub paths: Vec<MoatPath>,
    pub body_index: usize,
    /// Empty, or the single mate arc `w -> u`.
    pub body_path: Vec<ArcId>,
    pub body_slack: Rational,
    /// `w`: the mate of `u`, or `u` itself when `u` is a component node.
    pub mate: NodeId,
    pub tight_arc: ArcId,
    pub merged_head: NodeId,
}

impl AugmentPlan {
    /// Upper bound on the cost added by this plan: all path costs plus the
    /// tight arc, before deduplication.
    pub fn gross_cost(&self, inst: &Instance) -> Rational {
        let paths: Rational = self.paths.iter().map(|p| inst.cost_of(&p.arcs)).sum();
        paths + inst.cost_of(&self.body_path) + inst.cost(self.tight_arc)
    }

    pub fn total_slack(&self) -> Rational {
        self.paths.iter().map(|p| &p.slack).sum::<Rational>() + &self.body_slack
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.paths
            .iter()
            .flat_map(|p| p.arcs.iter().copied())
            .chain(self.body_path.iter().copied())
            .chain(std::iter::once(self.tight_arc))
    }
}

pub fn build_plan(inst: &Instance, pst: &PartialSteinerTree, outcome: &PhaseOutcome) -> Result<AugmentPlan> {
    let delta = &outcome.stop_time;
    let tight = inst.arc(outcome.tight_arc);
    let (u, v) = (tight.tail, tight.head);
    let j = outcome.body_index;
    let body = outcome
        .state
        .bodies
        .get(j)
        .filter(|b| b.members.contains(&u))
        .ok_or_else(|| Error::invariant(format!("tail {u} of the tight arc lies in no virtual body")))?;

    let (mate, body_path) = if pst.component(j).nodes.contains(&u) {
        (u, Vec::new())
    } else {
        let a = *body
            .mates
            .get(&u)
            .ok_or_else(|| Error::invariant(format!("virtual node {u} has no mate")))?;
        (inst.arc(a).tail, vec![a])
    };
    let body_slack = delta - &inst.cost_of(&body_path);
    if body_slack.is_negative() {
        return Err(Error::invariant(format!("mate arc of {u} costs more than Δ = {delta}")));
    }

    let mut paths = Vec::with_capacity(outcome.absorbing_set.len());
    for &i in &outcome.absorbing_set {
        let moat = outcome
            .moat(i)
            .ok_or_else(|| Error::invariant(format!("absorbing component {i} has no moat")))?;
        let arcs = moat
            .path_to_head(inst, v)
            .ok_or_else(|| Error::invariant(format!("no parent path from {v} to head {}", moat.head)))?;
        let slack = delta - &inst.cost_of(&arcs);
        if slack.is_negative() {
            return Err(Error::invariant(format!("path from {v} to {} is longer than Δ", moat.head)));
        }
        paths.push(MoatPath { component: i, arcs, slack });
    }

    let plan = AugmentPlan {
        paths,
        body_index: j,
        body_path,
        body_slack,
        mate,
        tight_arc: outcome.tight_arc,
        merged_head: pst.component(j).head,
    };
    if plan.total_slack() < tight.cost {
        return Err(Error::invariant(format!(
            "slacks {} do not cover tight arc cost {}",
            plan.total_slack(),
            tight.cost
        )));
    }
    Ok(plan)
}

/// Merges the components of `J ∪ {j}` along the plan's arcs. The result has
/// `ell - |J|` non-root components; the merged component keeps `j`'s slot
/// and head.
pub fn build_augmented_tree(
    inst: &Instance,
    pst: &PartialSteinerTree,
    plan: &AugmentPlan,
    outcome: &PhaseOutcome,
) -> Result<PartialSteinerTree> {
    if plan.tight_arc != outcome.tight_arc || plan.body_index != outcome.body_index {
        return Err(Error::Contract("augment plan does not match the phase outcome".into()));
    }
    let mut next = pst.clone();
    next.merge(inst, plan.body_index, &outcome.absorbing_set, plan.arcs());
    let merged_index = plan.body_index
        - outcome.absorbing_set.iter().filter(|&&i| i < plan.body_index).count();
    let merged = next.component(merged_index);
    debug_assert_eq!(merged.head, plan.merged_head);
    let edges: &BTreeSet<ArcId> = &merged.edges;
    let reached = reachable(inst, &[merged.head], |a| edges.contains(&a));
    if let Some(v) = merged.nodes.iter().find(|v| !reached[v.0]) {
        return Err(Error::invariant(format!("merged head {} cannot reach {v}", merged.head)));
    }
    Ok(next)
}
