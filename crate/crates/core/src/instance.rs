//! Problem representation: a directed graph with non-negative arc costs, a
//! root and a terminal set, plus the line-oriented text format and the
//! shortest-path helpers used throughout the crate.
//!
//! Node ids are dense and 0-based in memory; the text format and every
//! user-facing report use 1-based labels.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::{self, Write as _};

use crate::error::{InstanceError, ParseError};
use crate::rational::{Dist, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based label as used in files and reports.
    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Position of an arc in the instance's arc list. Arc order is the
/// tie-breaking order everywhere downstream.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ArcId(pub usize);

impl ArcId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.label())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Rational,
}

impl Arc {
    pub fn new(tail: usize, head: usize, cost: impl Into<Rational>) -> Self {
        Arc { tail: NodeId(tail), head: NodeId(head), cost: cost.into() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Root,
    Terminal,
    Steiner,
}

/// A directed Steiner tree instance `(G, c, X, r)`. Immutable once built.
#[derive(Clone, Debug)]
pub struct Instance {
    node_count: usize,
    arcs: Vec<Arc>,
    root: NodeId,
    terminals: Vec<NodeId>,
    roles: Vec<Role>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.arcs == other.arcs
            && self.root == other.root
            && self.terminals == other.terminals
    }
}

impl Eq for Instance {}

impl Instance {
    /// Builds an instance from 0-based node indices. Structural problems
    /// (range, self-loops, root/terminal clashes) are rejected here; cost
    /// signs, quasi-bipartiteness and reachability are left to [`validate`].
    pub fn new(
        node_count: usize,
        arcs: Vec<Arc>,
        root: usize,
        terminals: Vec<usize>,
    ) -> Result<Self, InstanceError> {
        if root >= node_count {
            return Err(InstanceError::NodeOutOfRange(root + 1));
        }
        let mut roles = vec![Role::Steiner; node_count];
        roles[root] = Role::Root;
        for &t in &terminals {
            if t >= node_count {
                return Err(InstanceError::NodeOutOfRange(t + 1));
            }
            match roles[t] {
                Role::Root => return Err(InstanceError::RootIsTerminal),
                Role::Terminal => return Err(InstanceError::DuplicateTerminal(t + 1)),
                Role::Steiner => roles[t] = Role::Terminal,
            }
        }
        let mut out_arcs = vec![Vec::new(); node_count];
        let mut in_arcs = vec![Vec::new(); node_count];
        for (i, arc) in arcs.iter().enumerate() {
            for end in [arc.tail, arc.head] {
                if end.0 >= node_count {
                    return Err(InstanceError::NodeOutOfRange(end.0 + 1));
                }
            }
            if arc.tail == arc.head {
                return Err(InstanceError::SelfLoop(i + 1));
            }
            out_arcs[arc.tail.0].push(ArcId(i));
            in_arcs[arc.head.0].push(ArcId(i));
        }
        Ok(Instance {
            node_count,
            arcs,
            root: NodeId(root),
            terminals: terminals.into_iter().map(NodeId).collect(),
            roles,
            out_arcs,
            in_arcs,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.0]
    }

    pub fn cost(&self, id: ArcId) -> &Rational {
        &self.arcs[id.0].cost
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arcs.len()).map(ArcId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn role(&self, v: NodeId) -> Role {
        self.roles[v.0]
    }

    pub fn is_steiner(&self, v: NodeId) -> bool {
        self.roles[v.0] == Role::Steiner
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.roles[v.0] == Role::Terminal
    }

    pub fn steiner_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|&v| self.is_steiner(v))
    }

    /// Arcs leaving `v`, ascending by id.
    pub fn out_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.out_arcs[v.0]
    }

    /// Arcs entering `v`, ascending by id.
    pub fn in_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.in_arcs[v.0]
    }

    pub fn cost_of<'a>(&self, arcs: impl IntoIterator<Item = &'a ArcId>) -> Rational {
        arcs.into_iter().map(|&a| self.cost(a)).sum()
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// # comment
/// Nodes 2
/// A 1 2 5
/// Root 1
/// T 2
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut node_count: Option<usize> = None;
    let mut arcs = Vec::new();
    let mut arc_lines = Vec::new();
    let mut root: Option<usize> = None;
    let mut terminals: Vec<(usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| ParseError::Malformed { line, reason: reason.to_string() };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let keyword = fields[0];
        if node_count.is_none() && keyword != "Nodes" {
            return Err(malformed("first declaration must be `Nodes <n>`"));
        }
        let node = |s: &str| -> Result<usize, ParseError> {
            let id: usize = s.parse().map_err(|_| malformed(&format!("bad node id `{s}`")))?;
            let n = node_count.unwrap_or(0);
            if id == 0 || id > n {
                return Err(malformed(&format!("node id {id} outside 1..={n}")));
            }
            Ok(id - 1)
        };
        match keyword {
            "Nodes" => {
                if node_count.is_some() {
                    return Err(malformed("duplicate Nodes declaration"));
                }
                let [_, n] = fields[..] else {
                    return Err(malformed("expected `Nodes <n>`"));
                };
                let n: usize = n.parse().map_err(|_| malformed("bad node count"))?;
                if n == 0 {
                    return Err(malformed("node count must be positive"));
                }
                node_count = Some(n);
            }
            "A" => {
                let [_, t, h, c] = fields[..] else {
                    return Err(malformed("expected `A <tail> <head> <cost>`"));
                };
                let (tail, head) = (node(t)?, node(h)?);
                if tail == head {
                    return Err(malformed("self-loop"));
                }
                let cost: Rational = c.parse().map_err(|_| malformed(&format!("bad cost `{c}`")))?;
                if cost.is_negative() {
                    return Err(ParseError::NegativeCost { line });
                }
                arcs.push(Arc { tail: NodeId(tail), head: NodeId(head), cost });
                arc_lines.push(line);
            }
            "Root" => {
                let [_, r] = fields[..] else {
                    return Err(malformed("expected `Root <id>`"));
                };
                let r = node(r)?;
                if root.is_some() {
                    return Err(ParseError::DuplicateRoot { line });
                }
                root = Some(r);
            }
            "T" => {
                let [_, t] = fields[..] else {
                    return Err(malformed("expected `T <id>`"));
                };
                let t = node(t)?;
                if terminals.iter().any(|&(x, _)| x == t) {
                    return Err(malformed(&format!("terminal {} listed twice", t + 1)));
                }
                terminals.push((t, line));
            }
            other => return Err(malformed(&format!("unknown keyword `{other}`"))),
        }
    }

    let last_line = text.lines().count().max(1);
    let Some(node_count) = node_count else {
        return Err(ParseError::Malformed { line: last_line, reason: "missing `Nodes` declaration".into() });
    };
    let Some(root) = root else {
        return Err(ParseError::Malformed { line: last_line, reason: "missing `Root` declaration".into() });
    };
    if let Some(&(t, line)) = terminals.iter().find(|&&(t, _)| t == root) {
        return Err(ParseError::TerminalIsRoot { line, node: t + 1 });
    }
    let inst = Instance::new(node_count, arcs, root, terminals.iter().map(|&(t, _)| t).collect())
        .map_err(|e| ParseError::Malformed { line: last_line, reason: e.to_string() })?;
    for (arc, &line) in inst.arcs().iter().zip(&arc_lines) {
        if inst.is_steiner(arc.tail) && inst.is_steiner(arc.head) {
            return Err(ParseError::QuasiBipartiteViolation {
                line,
                tail: arc.tail.label(),
                head: arc.head.label(),
            });
        }
    }
    Ok(inst)
}

/// Canonical text form; `parse_instance(&serialize_instance(i)) == i`.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "Nodes {}", inst.node_count()).unwrap();
    for arc in inst.arcs() {
        writeln!(out, "A {} {} {}", arc.tail.label(), arc.head.label(), arc.cost).unwrap();
    }
    writeln!(out, "Root {}", inst.root().label()).unwrap();
    for t in inst.terminals() {
        writeln!(out, "T {}", t.label()).unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub failures: Vec<String>,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            if check.ok() {
                writeln!(f, "{}=ok", check.name)?;
            } else {
                writeln!(f, "{}=FAIL {}", check.name, check.failures.join("; "))?;
            }
        }
        Ok(())
    }
}

pub fn validate(inst: &Instance) -> ValidationReport {
    let quasi_bipartite = Check {
        name: "quasi_bipartite",
        failures: inst
            .arcs()
            .iter()
            .enumerate()
            .filter(|(_, a)| inst.is_steiner(a.tail) && inst.is_steiner(a.head))
            .map(|(i, a)| format!("arc {} ({} -> {}) joins two Steiner nodes", i + 1, a.tail, a.head))
            .collect(),
    };
    let non_negative = Check {
        name: "non_negative_costs",
        failures: inst
            .arcs()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.cost.is_negative())
            .map(|(i, a)| format!("arc {} has cost {}", i + 1, a.cost))
            .collect(),
    };
    let reached = reachable(inst, &[inst.root()], |_| true);
    let reachability = Check {
        name: "terminal_reachability",
        failures: inst
            .terminals()
            .iter()
            .filter(|t| !reached[t.0])
            .map(|t| format!("terminal {t} unreachable from root"))
            .collect(),
    };
    ValidationReport { checks: vec![quasi_bipartite, non_negative, reachability] }
}

/// Nodes reachable from `sources` using only arcs accepted by `allow`.
pub fn reachable(inst: &Instance, sources: &[NodeId], allow: impl Fn(ArcId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; inst.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if !seen[s.0] {
            seen[s.0] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &a in inst.out_arcs(u) {
            let v = inst.arc(a).head;
            if !seen[v.0] && allow(a) {
                seen[v.0] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Result of a multi-source Dijkstra run.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub dist: Vec<Dist>,
    /// Last arc on the chosen shortest path (forward runs) or first arc
    /// (reverse runs).
    pub via: Vec<Option<ArcId>>,
}

/// Multi-source Dijkstra. Forward runs compute `min_s seed(s) + d(s, v)`;
/// reverse runs compute `min_s seed(s) + d(v, s)`. Ties resolve to the
/// lower node index first, so results are deterministic.
pub fn dijkstra(inst: &Instance, seeds: &[(NodeId, Rational)], reverse: bool) -> ShortestPaths {
    let n = inst.node_count();
    let mut dist = vec![Dist::Inf; n];
    let mut via = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (s, d) in seeds {
        if Dist::Finite(d.clone()) < dist[s.0] {
            dist[s.0] = Dist::Finite(d.clone());
            heap.push(Reverse((d.clone(), s.0)));
        }
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let arcs = if reverse { inst.in_arcs(NodeId(u)) } else { inst.out_arcs(NodeId(u)) };
        for &a in arcs {
            let arc = inst.arc(a);
            let w = if reverse { arc.tail } else { arc.head };
            if done[w.0] {
                continue;
            }
            let nd = &d + &arc.cost;
            let cand = Dist::Finite(nd.clone());
            if cand < dist[w.0] {
                dist[w.0] = cand;
                via[w.0] = Some(a);
                heap.push(Reverse((nd, w.0)));
            }
        }
    }
    ShortestPaths { dist, via }
}

/// `d(S, v)` together with one witnessing path (arcs in travel order).
/// Returns `(Dist::Inf, [])` if `v` is unreachable from every source.
pub fn shortest_dist(inst: &Instance, sources: &[NodeId], target: NodeId) -> (Dist, Vec<ArcId>) {
    assert!(!sources.is_empty(), "shortest_dist requires a non-empty source set");
    let seeds: Vec<_> = sources.iter().map(|&s| (s, Rational::zero())).collect();
    let sp = dijkstra(inst, &seeds, false);
    if sp.dist[target.0].is_inf() {
        return (Dist::Inf, Vec::new());
    }
    let mut path = Vec::new();
    let mut cur = target;
    while let Some(a) = sp.via[cur.0] {
        path.push(a);
        cur = inst.arc(a).tail;
    }
    path.reverse();
    (sp.dist[target.0].clone(), path)
}
