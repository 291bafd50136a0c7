//! Driver: grow, augment, repeat until every terminal hangs off the root.

use std::collections::BTreeSet;

use crate::augment::{build_augmented_tree, build_plan, AugmentPlan};
use crate::certificate::DualCertificate;
use crate::error::{Error, Result};
use crate::instance::{shortest_dist, validate, ArcId, Instance};
use crate::moat::{run_phase, PhaseOptions, PhaseOutcome};
use crate::partial_tree::{
    check_partial_tree, extract_solution, init_partial_tree, tree_cost, zero_cost_closure,
};
use crate::rational::{Dist, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Assert engine and partial-tree invariants after every event and step.
    pub checked: bool,
}

/// Everything that happened in one phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseRecord {
    pub outcome: PhaseOutcome,
    pub plan: AugmentPlan,
    pub cost_before: Rational,
    pub cost_after: Rational,
    /// Non-root components left after augmentation (before the next
    /// zero-cost merge).
    pub ell_after: usize,
    /// Arcs in `E(T')` that were not in `E(T)`.
    pub added_arcs: BTreeSet<ArcId>,
}

impl PhaseRecord {
    pub fn ell(&self) -> usize {
        self.outcome.ell
    }

    pub fn delta(&self) -> &Rational {
        &self.outcome.stop_time
    }

    /// `2 * Δ * (ell - ell')`, the per-phase allowance.
    pub fn allowance(&self) -> Rational {
        &(self.delta() * 2) * (self.ell() - self.ell_after) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub solution_arcs: BTreeSet<ArcId>,
    pub total_cost: Rational,
    /// `max_p ell_p * Δ_p`, a lower bound on the LP optimum.
    pub dual_lower_bound: Rational,
    /// `2 * H_k * dual_lower_bound`.
    pub harmonic_bound: Rational,
    pub certificate: DualCertificate,
    pub phases: Vec<PhaseRecord>,
}

impl SolveResult {
    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }
}

/// Exact harmonic number `H_k`; `H_0 = 0`.
pub fn harmonic(k: usize) -> Rational {
    (1..=k as i64).map(|i| Rational::new(1, i)).sum()
}

pub fn solve(inst: &Instance) -> Result<SolveResult> {
    solve_with(inst, SolveOptions::default())
}

pub fn solve_with(inst: &Instance, opts: SolveOptions) -> Result<SolveResult> {
    let report = validate(inst);
    if !report.ok() {
        return Err(Error::Invalid(report));
    }
    let k = inst.terminals().len();
    let mut pst = init_partial_tree(inst);
    let mut phases: Vec<PhaseRecord> = Vec::new();

    loop {
        let p = phases.len();
        pst = zero_cost_closure(inst, &pst);
        if opts.checked {
            check_tree(inst, &pst).map_err(|e| e.in_phase(p))?;
            check_closed(inst, &pst).map_err(|e| e.in_phase(p))?;
        }
        if pst.ell() == 0 {
            break;
        }
        if p >= k {
            return Err(Error::invariant(format!("more than k = {k} phases")).in_phase(p));
        }
        let phase_opts = PhaseOptions { checked: opts.checked };
        let outcome = run_phase(inst, &pst, phase_opts).map_err(|e| e.in_phase(p))?;
        let plan = build_plan(inst, &pst, &outcome).map_err(|e| e.in_phase(p))?;
        let next = build_augmented_tree(inst, &pst, &plan, &outcome).map_err(|e| e.in_phase(p))?;
        if opts.checked {
            check_tree(inst, &next).map_err(|e| e.in_phase(p))?;
        }

        let before_edges = pst.edges();
        let added_arcs: BTreeSet<ArcId> = next.edges().difference(&before_edges).copied().collect();
        let cost_before = tree_cost(inst, &pst);
        let cost_after = tree_cost(inst, &next);
        let record = PhaseRecord {
            cost_before,
            cost_after,
            ell_after: next.ell(),
            added_arcs,
            plan,
            outcome,
        };
        check_phase_bound(inst, &record).map_err(|e| e.in_phase(p))?;
        phases.push(record);
        pst = next;
    }

    let solution_arcs = extract_solution(inst, &pst)?;
    let total_cost = inst.cost_of(&solution_arcs);
    let dual_lower_bound = phases
        .iter()
        .map(|ph| ph.outcome.dual_value())
        .max()
        .unwrap_or_else(Rational::zero);
    let harmonic_bound = &(&harmonic(k) * 2) * &dual_lower_bound;

    // telescoping: sum of per-phase allowances fits under 2 H_k LB
    let allowances: Rational = phases.iter().map(PhaseRecord::allowance).sum();
    if allowances > harmonic_bound {
        return Err(Error::invariant(format!(
            "phase allowances {allowances} exceed 2 H_k LB = {harmonic_bound}"
        )));
    }
    if total_cost > harmonic_bound {
        return Err(Error::invariant(format!(
            "cost {total_cost} exceeds 2 H_k LB = {harmonic_bound}"
        )));
    }

    let certificate = DualCertificate::from_run(inst, &phases, &solution_arcs, &total_cost);
    Ok(SolveResult {
        solution_arcs,
        total_cost,
        dual_lower_bound,
        harmonic_bound,
        certificate,
        phases,
    })
}

fn check_tree(inst: &Instance, pst: &crate::partial_tree::PartialSteinerTree) -> Result<()> {
    let violations = check_partial_tree(inst, pst);
    if violations.is_empty() {
        return Ok(());
    }
    let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Err(Error::invariant(format!("partial tree invalid: {}", text.join("; "))))
}

/// After zero-cost merging no component reaches a foreign non-root head
/// for free.
fn check_closed(inst: &Instance, pst: &crate::partial_tree::PartialSteinerTree) -> Result<()> {
    for (i, c) in pst.components().enumerate() {
        let sources: Vec<_> = c.nodes.iter().copied().collect();
        for (j, other) in pst.components().enumerate().skip(1) {
            if i == j {
                continue;
            }
            let (d, _) = shortest_dist(inst, &sources, other.head);
            if d == Dist::Finite(Rational::zero()) {
                return Err(Error::invariant(format!(
                    "component {i} reaches head {} at zero cost after merging",
                    other.head
                )));
            }
        }
    }
    Ok(())
}

/// `cost(T') - cost(T) <= (|J| + 1) Δ <= 2 Δ (ell - ell')`.
fn check_phase_bound(inst: &Instance, record: &PhaseRecord) -> Result<()> {
    let delta = record.delta();
    let added = &record.cost_after - &record.cost_before;
    let j_size = record.outcome.absorbing_set.len();
    if record.ell_after + j_size != record.ell() {
        return Err(Error::invariant(format!(
            "ell went from {} to {} but |J| = {j_size}",
            record.ell(),
            record.ell_after
        )));
    }
    if added != inst.cost_of(&record.added_arcs) {
        return Err(Error::invariant("added arcs do not account for the cost increase"));
    }
    let gross = record.plan.gross_cost(inst);
    let per_absorbed = delta * (j_size as i64 + 1);
    if added > gross || gross > per_absorbed || per_absorbed > record.allowance() {
        return Err(Error::invariant(format!(
            "phase cost {added} (gross {gross}) breaks (|J|+1)Δ = {per_absorbed} <= {}",
            record.allowance()
        )));
    }
    Ok(())
}
