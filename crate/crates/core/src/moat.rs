//! The dual growing procedure.
//!
//! One moat is grown around the head of every non-root component, all at
//! unit rate, in exact rational time. Each arc carries a load (the number of
//! moats it currently enters) and accumulates payment at that rate; the next
//! event is the earliest arc whose payment reaches its cost, ties broken by
//! ascending arc id. A tight arc either terminates the phase (its tail lies
//! in some virtual body `j` and its head in a moat other than `j`'s) or
//! extends the single moat it enters by its tail.
//!
//! Moat index `k` (0-based) belongs to non-root component `k + 1`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::instance::{dijkstra, ArcId, Instance, NodeId};
use crate::partial_tree::PartialSteinerTree;
use crate::rational::{Dist, Rational};

/// One moat after a phase: entry time of every member and the tight arc
/// through which it joined (absent for the head).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moat {
    pub head: NodeId,
    pub entry: BTreeMap<NodeId, Rational>,
    pub parent: BTreeMap<NodeId, ArcId>,
}

impl Moat {
    pub fn contains(&self, v: NodeId) -> bool {
        self.entry.contains_key(&v)
    }

    /// Arcs from `v` to the head along parent pointers, in travel order.
    pub fn path_to_head(&self, inst: &Instance, v: NodeId) -> Option<Vec<ArcId>> {
        if !self.contains(v) {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = v;
        while cur != self.head {
            let a = *self.parent.get(&cur)?;
            path.push(a);
            cur = inst.arc(a).head;
            if path.len() > self.entry.len() {
                return None;
            }
        }
        Some(path)
    }
}

/// Virtual body: the component's nodes plus Steiner nodes attached by a
/// tight arc from the component. `mates` maps each attached node to that arc.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Body {
    pub members: BTreeSet<NodeId>,
    pub mates: BTreeMap<NodeId, ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoatState {
    /// `moats[k]` is grown around the head of component `k + 1`.
    pub moats: Vec<Moat>,
    /// `bodies[i]` for component `i`, root included.
    pub bodies: Vec<Body>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseOutcome {
    /// Stop time Δ.
    pub stop_time: Rational,
    pub tight_arc: ArcId,
    /// Component `j` whose virtual body holds the tail of the tight arc.
    pub body_index: usize,
    /// Components `i != j` whose moats hold the head of the tight arc,
    /// ascending.
    pub absorbing_set: Vec<usize>,
    pub state: MoatState,
    pub ell: usize,
    /// Valid events processed (absorptions plus the terminating one).
    pub events: usize,
}

impl PhaseOutcome {
    /// The moat of non-root component `i` (1-based).
    pub fn moat(&self, component: usize) -> Option<&Moat> {
        component.checked_sub(1).and_then(|k| self.state.moats.get(k))
    }

    /// Dual objective contributed by this phase, `ell * Δ`.
    pub fn dual_value(&self) -> Rational {
        &self.stop_time * self.ell as i64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseOptions {
    /// Assert every engine invariant after every event.
    pub checked: bool,
}

struct ArcState {
    last: Rational,
    paid: Rational,
    load: u32,
    version: u32,
}

struct Engine<'a> {
    inst: &'a Instance,
    pst: &'a PartialSteinerTree,
    ell: usize,
    owner: Vec<Option<usize>>,
    heads: Vec<NodeId>,
    entry: Vec<Vec<Option<Rational>>>,
    parent: Vec<Vec<Option<ArcId>>>,
    moats_of: Vec<Vec<usize>>,
    body_of: Vec<Option<usize>>,
    mate: Vec<Option<ArcId>>,
    arcs: Vec<ArcState>,
    heap: BinaryHeap<Reverse<(Rational, usize, u32)>>,
    now: Rational,
    /// Reverse distances to each head; only populated in checked mode.
    dist_to_head: Vec<Vec<Dist>>,
}

/// Runs the dual growing procedure on `pst` until the first terminating
/// tight arc.
///
/// `pst` must be a valid partial Steiner tree with at least one non-root
/// component on which zero-cost merging has already been applied.
pub fn run_phase(inst: &Instance, pst: &PartialSteinerTree, opts: PhaseOptions) -> Result<PhaseOutcome> {
    let ell = pst.ell();
    if ell == 0 {
        return Err(Error::Contract("run_phase needs at least one non-root component".into()));
    }
    let mut engine = Engine::new(inst, pst, opts.checked)?;
    let guard = inst.node_count() * ell + inst.arc_count();
    let mut events = 0usize;
    while let Some(Reverse((time, a, version))) = engine.heap.pop() {
        if engine.arcs[a].version != version {
            continue;
        }
        if time < engine.now {
            return Err(Error::invariant(format!("event for arc {} scheduled in the past", ArcId(a))));
        }
        events += 1;
        if events > guard {
            return Err(Error::invariant(format!("event count exceeded {guard}")));
        }
        engine.now = time;
        let arc = inst.arc(ArcId(a));
        let (u, v) = (arc.tail, arc.head);
        if let Some(j) = engine.body_of[u.0] {
            let absorbing: Vec<usize> =
                engine.moats_of[v.0].iter().map(|&k| k + 1).filter(|&i| i != j).collect();
            if !absorbing.is_empty() {
                let mut absorbing = absorbing;
                absorbing.sort_unstable();
                if opts.checked {
                    engine.check_invariants()?;
                }
                return Ok(engine.finish(ArcId(a), j, absorbing, events));
            }
        }
        engine.absorb(ArcId(a), opts.checked)?;
        if opts.checked {
            engine.check_invariants()?;
        }
    }
    Err(Error::invariant("event queue ran dry before termination"))
}

impl<'a> Engine<'a> {
    fn new(inst: &'a Instance, pst: &'a PartialSteinerTree, checked: bool) -> Result<Self> {
        let n = inst.node_count();
        let ell = pst.ell();
        let owner = pst.component_of(n);
        let heads: Vec<NodeId> = pst.nonroot.iter().map(|c| c.head).collect();
        let mut body_of = owner.clone();
        // free Steiner nodes start outside every body
        for v in &pst.free_steiner {
            body_of[v.0] = None;
        }
        let mut engine = Engine {
            inst,
            pst,
            ell,
            owner,
            heads,
            entry: vec![vec![None; n]; ell],
            parent: vec![vec![None; n]; ell],
            moats_of: vec![Vec::new(); n],
            body_of,
            mate: vec![None; n],
            arcs: inst
                .arcs()
                .iter()
                .map(|_| ArcState { last: Rational::zero(), paid: Rational::zero(), load: 0, version: 0 })
                .collect(),
            heap: BinaryHeap::new(),
            now: Rational::zero(),
            dist_to_head: Vec::new(),
        };
        for k in 0..ell {
            engine.seed_zero_ball(k)?;
        }
        for a in 0..inst.arc_count() {
            let load = engine.load_of(ArcId(a));
            if load > 0 {
                engine.arcs[a].load = load;
                engine.schedule(a);
            }
        }
        if checked {
            engine.dist_to_head = engine
                .heads
                .iter()
                .map(|&h| dijkstra(inst, &[(h, Rational::zero())], true).dist)
                .collect();
            engine.check_invariants()?;
        }
        Ok(engine)
    }

    /// `M_k <- {v : d(v, h_k) = 0}` via reverse search over zero-cost arcs.
    fn seed_zero_ball(&mut self, k: usize) -> Result<()> {
        let head = self.heads[k];
        let zero = Rational::zero();
        self.enter(k, head, zero.clone(), None);
        let mut stack = vec![head];
        while let Some(x) = stack.pop() {
            for &a in self.inst.in_arcs(x) {
                let arc = self.inst.arc(a);
                let w = arc.tail;
                if arc.cost.is_zero() && self.entry[k][w.0].is_none() {
                    match self.owner[w.0] {
                        Some(i) if i != k + 1 => {
                            return Err(Error::Contract(format!(
                                "component {i} reaches head {head} at zero cost; apply zero_cost_closure first"
                            )))
                        }
                        _ => {}
                    }
                    self.enter(k, w, zero.clone(), Some(a));
                    stack.push(w);
                }
            }
        }
        Ok(())
    }

    fn enter(&mut self, k: usize, v: NodeId, time: Rational, via: Option<ArcId>) {
        self.entry[k][v.0] = Some(time);
        self.parent[k][v.0] = via;
        self.moats_of[v.0].push(k);
    }

    fn is_member(&self, k: usize, v: NodeId) -> bool {
        self.entry[k][v.0].is_some()
    }

    /// Number of moats the arc currently enters.
    fn load_of(&self, a: ArcId) -> u32 {
        let arc = self.inst.arc(a);
        self.moats_of[arc.head.0].iter().filter(|&&k| !self.is_member(k, arc.tail)).count() as u32
    }

    fn schedule(&mut self, a: usize) {
        let st = &self.arcs[a];
        debug_assert!(st.load > 0);
        let slack = self.inst.cost(ArcId(a)) - &st.paid;
        let time = &st.last + &(&slack / st.load as i64);
        self.heap.push(Reverse((time, a, st.version)));
    }

    fn refresh(&mut self, a: ArcId) {
        let new_load = self.load_of(a);
        let now = self.now.clone();
        let st = &mut self.arcs[a.0];
        if new_load == st.load {
            return;
        }
        let elapsed = &now - &st.last;
        st.paid += &(&elapsed * st.load as i64);
        st.last = now;
        st.load = new_load;
        st.version += 1;
        if new_load > 0 {
            self.schedule(a.0);
        }
    }

    /// Non-terminating tight arc `uv`: `u` joins the unique moat `uv` enters.
    fn absorb(&mut self, a: ArcId, checked: bool) -> Result<()> {
        let arc = self.inst.arc(a);
        let (u, v) = (arc.tail, arc.head);
        let crossing: Vec<usize> =
            self.moats_of[v.0].iter().copied().filter(|&k| !self.is_member(k, u)).collect();
        let [k] = crossing[..] else {
            return Err(Error::invariant(format!(
                "tight arc {a} enters {} moats at time {}",
                crossing.len(),
                self.now
            )));
        };
        if checked {
            // the arc must never have been paid for by any other moat
            for &other in &self.moats_of[v.0] {
                if other == k {
                    continue;
                }
                let eu = self.entry[other][u.0].as_ref().unwrap_or(&self.now);
                let ev = self.entry[other][v.0].as_ref().unwrap();
                if eu > ev {
                    return Err(Error::invariant(format!(
                        "tight arc {a} was also loaded by moat of {}",
                        self.heads[other]
                    )));
                }
            }
        }
        if u == self.inst.root() {
            return Err(Error::invariant("root would enter a moat"));
        }
        self.enter(k, u, self.now.clone(), Some(a));
        if self.body_of[u.0] == Some(k + 1) {
            match self.body_of[v.0] {
                None => {
                    if checked
                        && (!self.pst.free_steiner.contains(&v) || self.owner[u.0] != Some(k + 1))
                    {
                        return Err(Error::invariant(format!(
                            "virtual node {v} attached through non-body arc {a}"
                        )));
                    }
                    self.body_of[v.0] = Some(k + 1);
                    self.mate[v.0] = Some(a);
                }
                Some(i) if i == k + 1 => {}
                Some(i) => {
                    return Err(Error::invariant(format!(
                        "node {v} in moat of component {} already belongs to body {i}",
                        k + 1
                    )))
                }
            }
        }
        let inst = self.inst;
        for &b in inst.out_arcs(u).iter().chain(inst.in_arcs(u)) {
            self.refresh(b);
        }
        Ok(())
    }

    fn finish(self, tight_arc: ArcId, body_index: usize, absorbing_set: Vec<usize>, events: usize) -> PhaseOutcome {
        let mut moats = Vec::with_capacity(self.ell);
        for k in 0..self.ell {
            let mut entry = BTreeMap::new();
            let mut parent = BTreeMap::new();
            for (v, e) in self.entry[k].iter().enumerate() {
                if let Some(e) = e {
                    entry.insert(NodeId(v), e.clone());
                    if let Some(a) = self.parent[k][v] {
                        parent.insert(NodeId(v), a);
                    }
                }
            }
            moats.push(Moat { head: self.heads[k], entry, parent });
        }
        let mut bodies = vec![Body::default(); self.ell + 1];
        for (v, b) in self.body_of.iter().enumerate() {
            if let Some(i) = b {
                bodies[*i].members.insert(NodeId(v));
                if let Some(a) = self.mate[v] {
                    bodies[*i].mates.insert(NodeId(v), a);
                }
            }
        }
        PhaseOutcome {
            stop_time: self.now,
            tight_arc,
            body_index,
            absorbing_set,
            state: MoatState { moats, bodies },
            ell: self.ell,
            events,
        }
    }

    /// Full invariant sweep at the current time.
    fn check_invariants(&self) -> Result<()> {
        let inst = self.inst;
        let now = &self.now;
        let fail = |msg: String| Err(Error::invariant(msg));
        for k in 0..self.ell {
            let head = self.heads[k];
            // heads are in their moats, the root never is
            if self.entry[k][head.0].as_ref() != Some(&Rational::zero()) {
                return fail(format!("head {head} missing from its moat"));
            }
            if self.is_member(k, inst.root()) {
                return fail(format!("moat of {head} contains the root"));
            }
            for v in inst.nodes() {
                let Some(e) = &self.entry[k][v.0] else {
                    // every node strictly closer than `now` must be inside
                    if let Dist::Finite(d) = &self.dist_to_head[k][v.0] {
                        if d < now {
                            return fail(format!("node {v} at distance {d} < {now} outside moat of {head}"));
                        }
                    }
                    continue;
                };
                if e > now {
                    return fail(format!("node {v} entered moat of {head} in the future"));
                }
                if self.dist_to_head[k][v.0] != Dist::Finite(e.clone()) {
                    return fail(format!(
                        "node {v} entered moat of {head} at {e} but its distance is {}",
                        self.dist_to_head[k][v.0]
                    ));
                }
                // parent chain reaches the head with cost equal to the entry time
                let mut cost = Rational::zero();
                let mut cur = v;
                let mut steps = 0;
                while cur != head {
                    let Some(a) = self.parent[k][cur.0] else {
                        return fail(format!("node {cur} in moat of {head} has no parent"));
                    };
                    let arc = inst.arc(a);
                    if arc.tail != cur || !self.is_member(k, arc.head) {
                        return fail(format!("bad parent arc {a} for {cur}"));
                    }
                    cost += &arc.cost;
                    cur = arc.head;
                    steps += 1;
                    if steps > inst.node_count() {
                        return fail(format!("parent cycle in moat of {head}"));
                    }
                }
                if &cost != e {
                    return fail(format!("parent chain of {v} costs {cost}, entry time {e}"));
                }
                // moats meet only in free Steiner nodes and avoid foreign bodies
                if self.moats_of[v.0].len() > 1 && self.owner[v.0].is_some() {
                    return fail(format!("non-free node {v} lies in several moats"));
                }
                match self.body_of[v.0] {
                    Some(i) if i != k + 1 => {
                        return fail(format!("moat of {head} meets body {i} at {v}"));
                    }
                    _ => {}
                }
            }
        }
        // virtual bodies: component nodes plus mated free Steiner nodes
        for v in inst.nodes() {
            match (self.owner[v.0], self.body_of[v.0]) {
                (Some(i), Some(b)) if i == b => {}
                (Some(i), b) => return fail(format!("node {v} of component {i} has body {b:?}")),
                (None, None) => {}
                (None, Some(b)) => {
                    let Some(a) = self.mate[v.0] else {
                        return fail(format!("virtual node {v} of body {b} has no mate"));
                    };
                    let arc = inst.arc(a);
                    if arc.head != v || self.owner[arc.tail.0] != Some(b) || &arc.cost > now {
                        return fail(format!("mate arc {a} of virtual node {v} is invalid"));
                    }
                }
            }
        }
        // dual feasibility, and the incremental payments agree with the
        // closed form computed from entry times
        for a in inst.arc_ids() {
            let arc = inst.arc(a);
            let mut closed = Rational::zero();
            for &k in &self.moats_of[arc.head.0] {
                let ev = self.entry[k][arc.head.0].as_ref().unwrap();
                let eu = self.entry[k][arc.tail.0].as_ref().unwrap_or(now);
                if eu > ev {
                    closed += &(eu - ev);
                }
            }
            if closed > arc.cost {
                return fail(format!("arc {a} overloaded: {closed} > {}", arc.cost));
            }
            let st = &self.arcs[a.0];
            let tracked = &st.paid + &(&(now - &st.last) * st.load as i64);
            if tracked != closed {
                return fail(format!("arc {a} payment drift: tracked {tracked}, closed form {closed}"));
            }
        }
        Ok(())
    }
}

/// `{v : entry_i(v) <= t}` for the moat of non-root component `i`.
pub fn reconstruct_moat(outcome: &PhaseOutcome, component: usize, t: &Rational) -> Result<BTreeSet<NodeId>> {
    let moat = outcome
        .moat(component)
        .ok_or_else(|| Error::Contract(format!("no moat for component index {component}")))?;
    if t.is_negative() || t > &outcome.stop_time {
        return Err(Error::Contract(format!("time {t} outside [0, {}]", outcome.stop_time)));
    }
    Ok(moat.entry.iter().filter(|(_, e)| *e <= t).map(|(v, _)| *v).collect())
}

/// Total dual mass on arc `a`: `sum_i max(0, min(Δ, entry_i(u)) - entry_i(v))`.
pub fn edge_dual_load(inst: &Instance, outcome: &PhaseOutcome, a: ArcId) -> Rational {
    let arc = inst.arc(a);
    let delta = &outcome.stop_time;
    let mut load = Rational::zero();
    for moat in &outcome.state.moats {
        let Some(ev) = moat.entry.get(&arc.head) else { continue };
        let eu = moat.entry.get(&arc.tail).unwrap_or(delta).clone().min_of(delta.clone());
        if &eu > ev {
            load += &(&eu - ev);
        }
    }
    load
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::{parse_instance, Arc};
    use crate::partial_tree::{init_partial_tree, zero_cost_closure};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn phase(inst: &Instance) -> PhaseOutcome {
        let pst = zero_cost_closure(inst, &init_partial_tree(inst));
        run_phase(inst, &pst, PhaseOptions { checked: true }).unwrap()
    }

    /// r=0; sets s1..s3 = 1..3; elements a=4, b=5.
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
    fn single_arc_phase() {
        let inst = parse_instance("Nodes 2\nA 1 2 5\nRoot 1\nT 2\n").unwrap();
        let out = phase(&inst);
        assert_eq!(out.stop_time, q(5));
        assert_eq!(out.tight_arc, ArcId(0));
        assert_eq!(out.body_index, 0);
        assert_eq!(out.absorbing_set, vec![1]);
        assert_eq!(out.dual_value(), q(5));
        assert_eq!(edge_dual_load(&inst, &out, ArcId(0)), q(5));
    }

    #[test]
    fn e2_first_phase() {
        let inst = e2();
        let out = phase(&inst);
        assert_eq!(out.stop_time, q(1));
        assert_eq!(out.tight_arc, ArcId(1));
        assert_eq!(out.body_index, 0);
        assert_eq!(out.absorbing_set, vec![1]);
        let ball = |k: usize| -> BTreeSet<NodeId> {
            reconstruct_moat(&out, k, &Rational::zero()).unwrap()
        };
        assert_eq!(ball(1), [1, 2, 4].map(NodeId).into());
        assert_eq!(ball(2), [1, 3, 5].map(NodeId).into());
        assert_eq!(reconstruct_moat(&out, 1, &Rational::new(1, 2)).unwrap(), [1, 2, 4].map(NodeId).into());
        assert_eq!(edge_dual_load(&inst, &out, ArcId(1)), q(1));
        assert_eq!(edge_dual_load(&inst, &out, ArcId(0)), q(2));
        assert_eq!(edge_dual_load(&inst, &out, ArcId(3)), q(0));
    }

    #[test]
    fn chain_terminates_on_lower_arc() {
        let inst = parse_instance("Nodes 3\nA 1 2 1\nA 2 3 1\nRoot 1\nT 2\nT 3\n").unwrap();
        let out = phase(&inst);
        assert_eq!(out.stop_time, q(1));
        assert_eq!(out.tight_arc, ArcId(0));
        assert_eq!(out.body_index, 0);
        assert_eq!(out.absorbing_set, vec![1]);
    }

    #[test]
    fn absorption_grows_virtual_body() {
        // r=0, terminals 1 and 2, Steiner 3.
        // 1 -> 3 (1) makes 3 virtual for component 1 once 1 joins 2's moat.
        let arcs = vec![Arc::new(0, 1, 10), Arc::new(1, 3, 1), Arc::new(3, 2, 1), Arc::new(0, 2, 10)];
        let inst = Instance::new(4, arcs, 0, vec![1, 2]).unwrap();
        let out = phase(&inst);
        // moat of 2 takes 3 at t=1; arc 1->3 then goes tight at t=2 with
        // 1 in body 1 and 3 in moat 2 -> terminate.
        assert_eq!(out.stop_time, q(2));
        assert_eq!(out.tight_arc, ArcId(1));
        assert_eq!(out.body_index, 1);
        assert_eq!(out.absorbing_set, vec![2]);
        assert_eq!(out.moat(2).unwrap().entry.get(&NodeId(3)), Some(&q(1)));
    }

    /// r=0, t1=1, t2=2, Steiner s=3, t3=4 already hanging off t1.
    pub(crate) fn mate_instance() -> (Instance, PartialSteinerTree) {
        let arcs = vec![
            Arc::new(0, 1, 50),
            Arc::new(0, 2, 50),
            Arc::new(1, 4, 7),
            Arc::new(3, 1, 2),
            Arc::new(4, 3, 3),
            Arc::new(3, 2, 9),
        ];
        let inst = Instance::new(5, arcs, 0, vec![1, 2, 4]).unwrap();
        let mut pst = init_partial_tree(&inst);
        pst.merge(&inst, 1, &[3], [ArcId(2)]);
        (inst, pst)
    }

    #[test]
    fn virtual_node_gets_mate() {
        let (inst, pst) = mate_instance();
        assert!(crate::partial_tree::check_partial_tree(&inst, &pst).is_empty());
        let out = run_phase(&inst, &pst, PhaseOptions { checked: true }).unwrap();
        // s joins moat 1 at t=2; t3 joins at t=5 through t3->s, making s
        // virtual with mate arc t3->s; s->t2 goes tight at t=9.
        assert_eq!(out.stop_time, q(9));
        assert_eq!(out.tight_arc, ArcId(5));
        assert_eq!(out.body_index, 1);
        assert_eq!(out.absorbing_set, vec![2]);
        assert_eq!(out.state.bodies[1].mates.get(&NodeId(3)), Some(&ArcId(4)));
        assert_eq!(out.moat(1).unwrap().entry.get(&NodeId(4)), Some(&q(5)));
        assert_eq!(out.events, 3);
    }

    #[test]
    fn root_arc_into_shared_steiner_node() {
        // Steiner 3 feeds both terminals at cost 0; r -> 3 is loaded twice.
        let arcs = vec![Arc::new(0, 3, 4), Arc::new(3, 1, 0), Arc::new(3, 2, 0)];
        let inst = Instance::new(4, arcs, 0, vec![1, 2]).unwrap();
        let out = phase(&inst);
        assert_eq!(out.stop_time, q(2));
        assert_eq!(out.absorbing_set, vec![1, 2]);
        assert_eq!(out.dual_value(), q(4));
        assert_eq!(edge_dual_load(&inst, &out, ArcId(0)), q(4));
    }

    #[test]
    fn contract_errors() {
        let inst = parse_instance("Nodes 2\nA 1 2 0\nRoot 1\nT 2\n").unwrap();
        let pst = init_partial_tree(&inst);
        assert!(matches!(run_phase(&inst, &pst, PhaseOptions::default()), Err(Error::Contract(_))));
        let closed = zero_cost_closure(&inst, &pst);
        assert!(matches!(run_phase(&inst, &closed, PhaseOptions::default()), Err(Error::Contract(_))));
        let inst = parse_instance("Nodes 2\nA 1 2 5\nRoot 1\nT 2\n").unwrap();
        let out = phase(&inst);
        assert!(reconstruct_moat(&out, 2, &q(0)).is_err());
        assert!(reconstruct_moat(&out, 0, &q(0)).is_err());
        assert!(reconstruct_moat(&out, 1, &q(6)).is_err());
    }

    #[test]
    fn deterministic() {
        let inst = e2();
        assert_eq!(phase(&inst), phase(&inst));
    }
}
