//! Cross-checks the event-driven moat engine against a deliberately naive
//! simulator that recomputes every arc load from scratch at every step.

use std::collections::BTreeMap;

use quasi_dst::augment::{build_augmented_tree, build_plan};
use quasi_dst::generators::{desk_instance, from_set_cover, random_set_cover};
use quasi_dst::instance::{Arc, ArcId, Instance, NodeId};
use quasi_dst::moat::{edge_dual_load, reconstruct_moat, run_phase, PhaseOptions, PhaseOutcome};
use quasi_dst::partial_tree::{init_partial_tree, zero_cost_closure, PartialSteinerTree};
use quasi_dst::Rational;

struct NaiveOutcome {
    delta: Rational,
    tight_arc: ArcId,
    body: usize,
    absorbed: Vec<usize>,
    /// Per non-root component (1-based index - 1): node -> entry time.
    moats: Vec<BTreeMap<NodeId, Rational>>,
}

fn naive_phase(inst: &Instance, pst: &PartialSteinerTree) -> NaiveOutcome {
    let n = inst.node_count();
    let ell = pst.ell();
    let zero = Rational::zero();
    let mut moats: Vec<BTreeMap<NodeId, Rational>> = Vec::new();
    for c in &pst.nonroot {
        let mut m = BTreeMap::from([(c.head, zero.clone())]);
        let mut todo = vec![c.head];
        while let Some(x) = todo.pop() {
            for a in inst.arc_ids() {
                let arc = inst.arc(a);
                if arc.head == x && arc.cost.is_zero() && !m.contains_key(&arc.tail) {
                    m.insert(arc.tail, zero.clone());
                    todo.push(arc.tail);
                }
            }
        }
        moats.push(m);
    }
    let mut body = pst.component_of(n);
    let mut paid = vec![zero.clone(); inst.arc_count()];
    let mut now = zero.clone();

    loop {
        let loads: Vec<i64> = inst
            .arcs()
            .iter()
            .map(|arc| moats.iter().filter(|m| m.contains_key(&arc.head) && !m.contains_key(&arc.tail)).count() as i64)
            .collect();
        let mut next: Option<(Rational, usize)> = None;
        for (a, arc) in inst.arcs().iter().enumerate() {
            if loads[a] > 0 {
                let wait = &(&arc.cost - &paid[a]) / loads[a];
                if next.as_ref().is_none_or(|(w, _)| &wait < w) {
                    next = Some((wait, a));
                }
            }
        }
        let (wait, a) = next.expect("some arc is always loaded");
        for (p, &l) in paid.iter_mut().zip(&loads) {
            *p = &*p + &(&wait * l);
        }
        now = &now + &wait;
        let Arc { tail: u, head: v, .. } = inst.arc(ArcId(a)).clone();
        if let Some(j) = body[u.0] {
            let absorbed: Vec<usize> =
                (1..=ell).filter(|&i| i != j && moats[i - 1].contains_key(&v)).collect();
            if !absorbed.is_empty() {
                return NaiveOutcome { delta: now, tight_arc: ArcId(a), body: j, absorbed, moats };
            }
        }
        let crossing: Vec<usize> =
            (0..ell).filter(|&k| moats[k].contains_key(&v) && !moats[k].contains_key(&u)).collect();
        assert_eq!(crossing.len(), 1, "tight arc {a} crosses {crossing:?}");
        let k = crossing[0];
        moats[k].insert(u, now.clone());
        if body[u.0] == Some(k + 1) && body[v.0].is_none() {
            body[v.0] = Some(k + 1);
        }
    }
}

fn compare(inst: &Instance, pst: &PartialSteinerTree, fast: &PhaseOutcome, label: &str) {
    let slow = naive_phase(inst, pst);
    assert_eq!(fast.stop_time, slow.delta, "{label}: Δ");
    assert_eq!(fast.tight_arc, slow.tight_arc, "{label}: tight arc");
    assert_eq!(fast.body_index, slow.body, "{label}: body");
    assert_eq!(fast.absorbing_set, slow.absorbed, "{label}: absorbed set");
    for (k, m) in slow.moats.iter().enumerate() {
        assert_eq!(&fast.state.moats[k].entry, m, "{label}: moat {}", k + 1);
    }
}

fn run_all_phases(inst: &Instance, label: &str) -> usize {
    let mut pst = init_partial_tree(inst);
    let mut phases = 0;
    loop {
        pst = zero_cost_closure(inst, &pst);
        if pst.ell() == 0 {
            return phases;
        }
        let out = run_phase(inst, &pst, PhaseOptions { checked: true }).unwrap();
        compare(inst, &pst, &out, &format!("{label} phase {phases}"));
        let plan = build_plan(inst, &pst, &out).unwrap();
        pst = build_augmented_tree(inst, &pst, &plan, &out).unwrap();
        phases += 1;
    }
}

fn e2() -> Instance {
    let arcs = vec![
        Arc::new(0, 1, 3),
        Arc::new(0, 2, 1),
        Arc::new(0, 3, 1),
        Arc::new(1, 4, 0),
        Arc::new(1, 5, 0),
        Arc::new(2, 4, 0),
        Arc::new(3, 5, 0),
    ];
    Instance::new(6, arcs, 0, vec![4, 5]).unwrap()
}

#[test]
fn e2_first_phase_matches_hand_trace() {
    let inst = e2();
    let pst = init_partial_tree(&inst);
    let slow = naive_phase(&inst, &pst);
    let (a, b, s1, s2, s3) = (NodeId(4), NodeId(5), NodeId(1), NodeId(2), NodeId(3));
    assert_eq!(slow.delta, Rational::one());
    assert_eq!(slow.tight_arc, ArcId(1));
    assert_eq!((slow.body, slow.absorbed.clone()), (0, vec![1]));
    let zero = Rational::zero();
    assert_eq!(slow.moats[0], BTreeMap::from([(a, zero.clone()), (s1, zero.clone()), (s2, zero.clone())]));
    assert_eq!(slow.moats[1], BTreeMap::from([(b, zero.clone()), (s1, zero.clone()), (s3, zero)]));

    let fast = run_phase(&inst, &pst, PhaseOptions { checked: true }).unwrap();
    compare(&inst, &pst, &fast, "e2");
    assert_eq!(reconstruct_moat(&fast, 1, &Rational::new(1, 2)).unwrap(), [a, s1, s2].into());
    assert_eq!(edge_dual_load(&inst, &fast, ArcId(1)), Rational::one());
    assert_eq!(edge_dual_load(&inst, &fast, ArcId(0)), Rational::from_integer(2));
    assert_eq!(edge_dual_load(&inst, &fast, ArcId(2)), Rational::one());
}

#[test]
fn chain_terminates_on_lower_arc() {
    let inst = Instance::new(3, vec![Arc::new(0, 1, 1), Arc::new(1, 2, 1)], 0, vec![1, 2]).unwrap();
    let slow = naive_phase(&inst, &init_partial_tree(&inst));
    assert_eq!((slow.delta, slow.tight_arc, slow.body, slow.absorbed), (Rational::one(), ArcId(0), 0, vec![1]));
    assert_eq!(run_all_phases(&inst, "chain"), 2);
}

#[test]
fn engine_matches_naive_simulation_on_random_corpus() {
    let mut phases = 0;
    for seed in 0..150 {
        phases += run_all_phases(&desk_instance(seed), &format!("seed {seed}"));
    }
    assert!(phases > 300);
}

#[test]
fn engine_matches_naive_simulation_on_set_cover() {
    for seed in 0..60 {
        let sc = random_set_cover(1 + seed as usize % 8, 1 + seed as usize % 6, seed).unwrap();
        run_all_phases(&from_set_cover(&sc).unwrap(), &format!("set cover {seed}"));
    }
}
