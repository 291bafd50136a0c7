//! Exact optima for small instances.
//!
//! [`exact_opt`] is the terminal-subset dynamic program
//! `f(S, v) = min( min_{S' ⊂ S} f(S', v) + f(S \ S', v), min_u c(v, u) + f(S, u) )`
//! with the second term closed by a Dijkstra pass per subset.
//! [`brute_force_opt`] enumerates arc subsets and is only a check on the first.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{reachable, validate, ArcId, Instance};
use crate::rational::{Dist, Rational};

pub const DEFAULT_K_LIMIT: usize = 12;
pub const DEFAULT_M_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    pub opt_cost: Rational,
    pub opt_arcs: BTreeSet<ArcId>,
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    Unset,
    Leaf,
    Split(usize),
    Extend(ArcId),
}

pub fn exact_opt(inst: &Instance, k_limit: usize) -> Result<ExactResult> {
    let k = inst.terminals().len();
    if k > k_limit {
        return Err(Error::Limit { what: "terminal count", value: k, limit: k_limit });
    }
    let report = validate(inst);
    if !report.ok() {
        return Err(Error::Invalid(report));
    }
    if k == 0 {
        return Ok(ExactResult { opt_cost: Rational::zero(), opt_arcs: BTreeSet::new() });
    }
    let n = inst.node_count();
    let full = (1usize << k) - 1;
    let mut f: Vec<Vec<Dist>> = vec![Vec::new(); full + 1];
    let mut how: Vec<Vec<Choice>> = vec![Vec::new(); full + 1];

    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let mut best = vec![Dist::Inf; n];
        let mut choice = vec![Choice::Unset; n];
        if mask.count_ones() == 1 {
            let t = inst.terminals()[mask.trailing_zeros() as usize];
            best[t.0] = Dist::Finite(Rational::zero());
            choice[t.0] = Choice::Leaf;
        } else {
            // proper submasks containing the lowest bit, so each split is seen once
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let a = sub | low;
                if a != mask {
                    let b = mask ^ a;
                    for v in 0..n {
                        if let (Dist::Finite(x), Dist::Finite(y)) = (&f[a][v], &f[b][v]) {
                            let cand = Dist::Finite(x + y);
                            if cand < best[v] {
                                best[v] = cand;
                                choice[v] = Choice::Split(a);
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        // relax f(S, v) <= c(v, u) + f(S, u) over arcs v -> u
        let mut heap: BinaryHeap<Reverse<(Rational, usize)>> = best
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.finite().map(|d| Reverse((d.clone(), v))))
            .collect();
        while let Some(Reverse((d, u))) = heap.pop() {
            if best[u] != Dist::Finite(d.clone()) {
                continue;
            }
            for &a in inst.in_arcs(crate::instance::NodeId(u)) {
                let v = inst.arc(a).tail.0;
                let cand = &d + inst.cost(a);
                if Dist::Finite(cand.clone()) < best[v] {
                    best[v] = Dist::Finite(cand.clone());
                    choice[v] = Choice::Extend(a);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
        f[mask] = best;
        how[mask] = choice;
    }

    let root = inst.root().0;
    let Dist::Finite(opt_cost) = f[full][root].clone() else {
        return Err(Error::Infeasible);
    };
    let mut opt_arcs = BTreeSet::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        match how[mask][v] {
            Choice::Leaf => {}
            Choice::Split(a) => {
                stack.push((a, v));
                stack.push((mask ^ a, v));
            }
            Choice::Extend(arc) => {
                opt_arcs.insert(arc);
                stack.push((mask, inst.arc(arc).head.0));
            }
            Choice::Unset => return Err(Error::invariant("oracle backtrack reached an unset state")),
        }
    }
    let union_cost = inst.cost_of(&opt_arcs);
    if union_cost != opt_cost || !feasible(inst, &opt_arcs) {
        return Err(Error::invariant("oracle reconstruction does not match its value"));
    }
    Ok(ExactResult { opt_cost: union_cost, opt_arcs })
}

fn feasible(inst: &Instance, arcs: &BTreeSet<ArcId>) -> bool {
    let seen = reachable(inst, &[inst.root()], |a| arcs.contains(&a));
    inst.terminals().iter().all(|t| seen[t.0])
}

/// Cheapest feasible arc subset by exhaustive search.
///
/// Subsets are visited in Gray-code order so each step flips one arc; costs
/// are scaled to a common denominator and tracked as integers.
pub fn brute_force_opt(inst: &Instance, m_limit: usize) -> Result<ExactResult> {
    let m = inst.arc_count();
    if m > m_limit || m >= 63 {
        return Err(Error::Limit { what: "arc count", value: m, limit: m_limit.min(62) });
    }
    let scaled = scaled_costs(inst)?;
    let n = inst.node_count();
    let root = inst.root().0;
    let mut out_mask = vec![0u64; n];
    for (a, arc) in inst.arcs().iter().enumerate() {
        out_mask[arc.tail.0] |= 1 << a;
    }
    let heads: Vec<usize> = inst.arcs().iter().map(|a| a.head.0).collect();
    let targets: u128 = if n <= 128 {
        inst.terminals().iter().fold(0, |acc, t| acc | 1u128 << t.0)
    } else {
        0
    };
    let feasible_mask = |subset: u64| -> bool {
        if n > 128 {
            let arcs: BTreeSet<ArcId> = (0..m).filter(|a| subset >> a & 1 == 1).map(ArcId).collect();
            return feasible(inst, &arcs);
        }
        let mut seen: u128 = 1 << root;
        let mut frontier = vec![root];
        while let Some(x) = frontier.pop() {
            let mut arcs = out_mask[x] & subset;
            while arcs != 0 {
                let a = arcs.trailing_zeros() as usize;
                arcs &= arcs - 1;
                let h = heads[a];
                if seen >> h & 1 == 0 {
                    seen |= 1 << h;
                    frontier.push(h);
                }
            }
        }
        seen & targets == targets
    };

    let mut best: Option<(i128, u64)> = None;
    let mut subset = 0u64;
    let mut cost = 0i128;
    for step in 0u64..(1u64 << m) {
        if step > 0 {
            let flip = step.trailing_zeros() as usize;
            subset ^= 1 << flip;
            if subset >> flip & 1 == 1 {
                cost += scaled[flip];
            } else {
                cost -= scaled[flip];
            }
        }
        if best.is_some_and(|(b, s)| cost > b || (cost == b && subset >= s)) {
            continue;
        }
        if feasible_mask(subset) {
            best = Some((cost, subset));
        }
    }
    let (_, subset) = best.ok_or(Error::Infeasible)?;
    let opt_arcs: BTreeSet<ArcId> = (0..m).filter(|a| subset >> a & 1 == 1).map(ArcId).collect();
    Ok(ExactResult { opt_cost: inst.cost_of(&opt_arcs), opt_arcs })
}

/// Arc costs times the lcm of their denominators.
fn scaled_costs(inst: &Instance) -> Result<Vec<i128>> {
    let lcm = inst
        .arcs()
        .iter()
        .fold(BigInt::one(), |acc, a| acc.lcm(a.cost.denom()));
    let too_big = || Error::Limit { what: "scaled arc cost bits", value: 128, limit: 100 };
    let mut total = BigInt::zero();
    let mut out = Vec::with_capacity(inst.arc_count());
    for a in inst.arcs() {
        let c = a.cost.numer() * (&lcm / a.cost.denom());
        total += &c;
        out.push(c.to_i128().ok_or_else(too_big)?);
    }
    total.to_i128().ok_or_else(too_big)?;
    Ok(out)
}
