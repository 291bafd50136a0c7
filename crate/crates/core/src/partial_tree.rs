//! Partial Steiner trees: head-rooted components that, together with the
//! free Steiner nodes, partition the node set.
//!
//! Component index 0 is always the root component; indices `1..=ell` are the
//! non-root components in their current order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::{reachable, ArcId, Instance, NodeId};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: BTreeSet<NodeId>,
    pub head: NodeId,
    pub edges: BTreeSet<ArcId>,
}

impl Component {
    pub fn singleton(head: NodeId) -> Self {
        Component { nodes: BTreeSet::from([head]), head, edges: BTreeSet::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSteinerTree {
    pub root: Component,
    pub nonroot: Vec<Component>,
    pub free_steiner: BTreeSet<NodeId>,
}

impl PartialSteinerTree {
    /// Number of non-root components.
    pub fn ell(&self) -> usize {
        self.nonroot.len()
    }

    /// Component by index; 0 is the root component.
    pub fn component(&self, i: usize) -> &Component {
        if i == 0 {
            &self.root
        } else {
            &self.nonroot[i - 1]
        }
    }

    fn component_mut(&mut self, i: usize) -> &mut Component {
        if i == 0 {
            &mut self.root
        } else {
            &mut self.nonroot[i - 1]
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        std::iter::once(&self.root).chain(self.nonroot.iter())
    }

    /// `E(T)`: the union of all component edge sets.
    pub fn edges(&self) -> BTreeSet<ArcId> {
        self.components().flat_map(|c| c.edges.iter().copied()).collect()
    }

    /// Component index of every node, `None` for free Steiner nodes.
    pub fn component_of(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; node_count];
        for (i, c) in self.components().enumerate() {
            for v in &c.nodes {
                owner[v.0] = Some(i);
            }
        }
        owner
    }

    /// Replaces components `into` and `others` by their union plus the
    /// endpoints of `arcs`. The merged component keeps the head and slot of
    /// `into`; the others are removed. Endpoints of `arcs` leave the free
    /// Steiner set.
    pub fn merge(
        &mut self,
        inst: &Instance,
        into: usize,
        others: &[usize],
        arcs: impl IntoIterator<Item = ArcId>,
    ) {
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for &o in others {
            debug_assert!(o != 0 && o != into);
            let c = self.component(o);
            nodes.extend(c.nodes.iter().copied());
            edges.extend(c.edges.iter().copied());
        }
        for a in arcs {
            let arc = inst.arc(a);
            nodes.insert(arc.tail);
            nodes.insert(arc.head);
            edges.insert(a);
        }
        for v in &nodes {
            self.free_steiner.remove(v);
        }
        let target = self.component_mut(into);
        target.nodes.extend(nodes);
        target.edges.extend(edges);
        let mut drop: Vec<usize> = others.to_vec();
        drop.sort_unstable();
        for o in drop.into_iter().rev() {
            self.nonroot.remove(o - 1);
        }
    }
}

/// The starting tree: `{r}`, one singleton per terminal, every Steiner node
/// free, no edges.
pub fn init_partial_tree(inst: &Instance) -> PartialSteinerTree {
    PartialSteinerTree {
        root: Component::singleton(inst.root()),
        nonroot: inst.terminals().iter().map(|&t| Component::singleton(t)).collect(),
        free_steiner: inst.steiner_nodes().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    /// Node in no component and not free.
    Uncovered(NodeId),
    /// Node in more than one of the partition classes.
    Overlap(NodeId),
    FreeNotSteiner(NodeId),
    RootHeadNotRoot,
    HeadNotInComponent { component: usize },
    HeadNotTerminal { component: usize },
    EdgeOutsideComponent { component: usize, arc: ArcId },
    Unreachable { component: usize, node: NodeId },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::Uncovered(v) => write!(f, "node {v} is in no class"),
            TreeViolation::Overlap(v) => write!(f, "node {v} is in several classes"),
            TreeViolation::FreeNotSteiner(v) => write!(f, "free node {v} is not a Steiner node"),
            TreeViolation::RootHeadNotRoot => write!(f, "root component head is not the root"),
            TreeViolation::HeadNotInComponent { component } => {
                write!(f, "component {component} does not contain its head")
            }
            TreeViolation::HeadNotTerminal { component } => {
                write!(f, "head of component {component} is not a terminal")
            }
            TreeViolation::EdgeOutsideComponent { component, arc } => {
                write!(f, "arc {arc} of component {component} leaves the component")
            }
            TreeViolation::Unreachable { component, node } => {
                write!(f, "node {node} not reachable from head of component {component}")
            }
        }
    }
}

/// Checks every defining property of a partial Steiner tree.
pub fn check_partial_tree(inst: &Instance, pst: &PartialSteinerTree) -> Vec<TreeViolation> {
    let mut out = Vec::new();
    let mut seen = vec![0u32; inst.node_count()];
    for c in pst.components() {
        for v in &c.nodes {
            seen[v.0] += 1;
        }
    }
    for v in &pst.free_steiner {
        seen[v.0] += 1;
        if !inst.is_steiner(*v) {
            out.push(TreeViolation::FreeNotSteiner(*v));
        }
    }
    for v in inst.nodes() {
        match seen[v.0] {
            0 => out.push(TreeViolation::Uncovered(v)),
            1 => {}
            _ => out.push(TreeViolation::Overlap(v)),
        }
    }
    if pst.root.head != inst.root() {
        out.push(TreeViolation::RootHeadNotRoot);
    }
    for (i, c) in pst.components().enumerate() {
        if !c.nodes.contains(&c.head) {
            out.push(TreeViolation::HeadNotInComponent { component: i });
        }
        if i > 0 && !inst.is_terminal(c.head) {
            out.push(TreeViolation::HeadNotTerminal { component: i });
        }
        for &a in &c.edges {
            let arc = inst.arc(a);
            if !c.nodes.contains(&arc.tail) || !c.nodes.contains(&arc.head) {
                out.push(TreeViolation::EdgeOutsideComponent { component: i, arc: a });
            }
        }
        let reached = reachable(inst, &[c.head], |a| c.edges.contains(&a));
        for v in &c.nodes {
            if !reached[v.0] {
                out.push(TreeViolation::Unreachable { component: i, node: *v });
            }
        }
    }
    out
}

/// Repeatedly merges a non-root component `j` into another component `i`
/// whenever `d(B_i, h_j) = 0`, buying the zero-cost path. On return every
/// such distance is positive. Cost is unchanged.
pub fn zero_cost_closure(inst: &Instance, pst: &PartialSteinerTree) -> PartialSteinerTree {
    let mut pst = pst.clone();
    if !inst.arcs().iter().any(|a| a.cost.is_zero()) {
        return pst;
    }
    'restart: loop {
        let owner = pst.component_of(inst.node_count());
        for i in 0..=pst.ell() {
            let via = zero_cost_search(inst, &pst.component(i).nodes);
            for j in 1..=pst.ell() {
                if j == i {
                    continue;
                }
                let head = pst.component(j).head;
                if via[head.0].is_none() {
                    continue;
                }
                // Walk back from h_j until the first node owned by a
                // component other than j; that component absorbs j.
                let mut suffix = Vec::new();
                let mut cur = head;
                let absorber = loop {
                    match owner[cur.0] {
                        Some(k) if k != j => break k,
                        _ => {}
                    }
                    let a = via[cur.0].flatten().expect("search path leaves the source set");
                    suffix.push(a);
                    cur = inst.arc(a).tail;
                };
                pst.merge(inst, absorber, &[j], suffix);
                continue 'restart;
            }
        }
        return pst;
    }
}

/// BFS over zero-cost arcs from `sources`. `Some(None)` marks a source,
/// `Some(Some(a))` the arc used to reach a node.
fn zero_cost_search(inst: &Instance, sources: &BTreeSet<NodeId>) -> Vec<Option<Option<ArcId>>> {
    let mut via = vec![None; inst.node_count()];
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    for &s in sources {
        via[s.0] = Some(None);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &a in inst.out_arcs(u) {
            let arc = inst.arc(a);
            if arc.cost.is_zero() && via[arc.head.0].is_none() {
                via[arc.head.0] = Some(Some(a));
                queue.push_back(arc.head);
            }
        }
    }
    via
}

/// `cost(E(T))`, each arc counted once.
pub fn tree_cost(inst: &Instance, pst: &PartialSteinerTree) -> Rational {
    inst.cost_of(&pst.edges())
}

/// `E(T)` of a tree with no non-root components, checked for feasibility.
pub fn extract_solution(inst: &Instance, pst: &PartialSteinerTree) -> Result<BTreeSet<ArcId>> {
    if pst.ell() > 0 {
        return Err(Error::Contract(format!(
            "extract_solution called with {} non-root components",
            pst.ell()
        )));
    }
    let arcs = pst.edges();
    let reached = reachable(inst, &[inst.root()], |a| arcs.contains(&a));
    if let Some(t) = inst.terminals().iter().find(|t| !reached[t.0]) {
        return Err(Error::invariant(format!("terminal {t} unreachable in extracted solution")));
    }
    Ok(arcs)
}

/// Shortest-path arborescence inside `arcs` restricted to what is needed to
/// reach the terminals. Never costs more than `arcs`.
pub fn prune_solution(inst: &Instance, arcs: &BTreeSet<ArcId>) -> BTreeSet<ArcId> {
    let sub = Instance::new(
        inst.node_count(),
        arcs.iter().map(|&a| inst.arc(a).clone()).collect(),
        inst.root().0,
        inst.terminals().iter().map(|t| t.0).collect(),
    )
    .expect("sub-instance of a valid instance");
    let ids: Vec<ArcId> = arcs.iter().copied().collect();
    let sp = crate::instance::dijkstra(&sub, &[(inst.root(), Rational::zero())], false);
    let mut keep = BTreeSet::new();
    for &t in inst.terminals() {
        let mut cur = t;
        while let Some(a) = sp.via[cur.0] {
            if !keep.insert(ids[a.0]) {
                break;
            }
            cur = sub.arc(a).tail;
        }
    }
    keep
}
