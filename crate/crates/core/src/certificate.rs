//! Self-contained dual certificates.
//!
//! A certificate records, for each phase, the moat entry times and the stop
//! time `Δ`. The dual solution it encodes puts density 1 on the nested sets
//! `{v : entry_i(v) <= t}` for `t` in `[0, Δ)`, so the dual mass on an arc
//! `uv` is `sum_i max(0, min(Δ, entry_i(u)) - entry_i(v))` and the phase's
//! dual value is `ell * Δ`. [`verify_certificate`] re-derives everything from
//! the instance and those numbers alone.
//!
//! # JSON layout (version 1)
//!
//! ```json
//! {
//!   "version": 1,
//!   "instance": { "nodes": 6, "arcs": 7, "terminals": 2, "sha256": "…" },
//!   "claimed_cost": "2/1",
//!   "solution_arcs": [2, 3, 6, 7],
//!   "phases": [
//!     {
//!       "ell": 2, "delta": "1/1", "tight_arc": 2, "body_index": 0,
//!       "absorbed": [1], "added_arcs": [2, 6],
//!       "moats": [ { "head": 5, "entries": [[5, "0/1"], [2, "0/1"]] } ]
//!     }
//!   ]
//! }
//! ```
//!
//! Node ids and arc ids are 1-based (arc ids count `A` lines in file order);
//! rationals are `"num/den"` strings. `body_index` is 0 for the root
//! component, otherwise the 1-based position of the moat in `moats`;
//! `absorbed` uses the same numbering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{reachable, serialize_instance, ArcId, Check, Instance, NodeId};
use crate::rational::Rational;
use crate::solver::{harmonic, PhaseRecord, SolveResult};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFingerprint {
    pub nodes: usize,
    pub arcs: usize,
    pub terminals: usize,
    pub sha256: String,
}

impl InstanceFingerprint {
    pub fn of(inst: &Instance) -> Self {
        let digest = Sha256::digest(serialize_instance(inst).as_bytes());
        InstanceFingerprint {
            nodes: inst.node_count(),
            arcs: inst.arc_count(),
            terminals: inst.terminals().len(),
            sha256: format!("{digest:x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertMoat {
    pub head: NodeId,
    pub entries: BTreeMap<NodeId, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertPhase {
    pub ell: usize,
    pub delta: Rational,
    pub moats: Vec<CertMoat>,
    pub tight_arc: ArcId,
    pub body_index: usize,
    pub absorbed: Vec<usize>,
    pub added_arcs: BTreeSet<ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCertificate {
    pub instance: InstanceFingerprint,
    pub phases: Vec<CertPhase>,
    pub solution_arcs: BTreeSet<ArcId>,
    pub claimed_cost: Rational,
}

impl DualCertificate {
    pub fn from_run(
        inst: &Instance,
        phases: &[PhaseRecord],
        solution_arcs: &BTreeSet<ArcId>,
        claimed_cost: &Rational,
    ) -> Self {
        let phases = phases
            .iter()
            .map(|ph| CertPhase {
                ell: ph.outcome.ell,
                delta: ph.outcome.stop_time.clone(),
                moats: ph
                    .outcome
                    .state
                    .moats
                    .iter()
                    .map(|m| CertMoat { head: m.head, entries: m.entry.clone() })
                    .collect(),
                tight_arc: ph.outcome.tight_arc,
                body_index: ph.outcome.body_index,
                absorbed: ph.outcome.absorbing_set.clone(),
                added_arcs: ph.added_arcs.clone(),
            })
            .collect();
        DualCertificate {
            instance: InstanceFingerprint::of(inst),
            phases,
            solution_arcs: solution_arcs.clone(),
            claimed_cost: claimed_cost.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&wire::Certificate::from(self)).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: wire::Certificate =
            serde_json::from_str(text).map_err(|e| Error::Certificate(format!("malformed JSON: {e}")))?;
        raw.try_into()
    }
}

/// `max_p ell_p * Δ_p`; 0 for a certificate without phases.
pub fn dual_lower_bound(cert: &DualCertificate) -> Rational {
    cert.phases
        .iter()
        .map(|p| &p.delta * p.ell as i64)
        .max()
        .unwrap_or_else(Rational::zero)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub lower_bound: Rational,
    pub bound: Rational,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.ok()).map(|c| c.name).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.ok() {
                writeln!(f, "{}=pass", c.name)?;
            } else {
                writeln!(f, "{}=fail", c.name)?;
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Findings {
    instance_match: Vec<String>,
    structure: Vec<String>,
    dual_feasibility: Vec<String>,
    root_excluded: Vec<String>,
    dual_value: Vec<String>,
    phase_cost_bound: Vec<String>,
    tight_arc: Vec<String>,
    entry_witness: Vec<String>,
    cost_accounting: Vec<String>,
    feasibility: Vec<String>,
    approximation_bound: Vec<String>,
}

/// Checks a solver result: the certificate itself plus agreement between
/// the certificate and the reported numbers.
pub fn verify(inst: &Instance, result: &SolveResult) -> VerifyReport {
    let mut report = verify_certificate(inst, &result.certificate);
    let cert = &result.certificate;
    let mut mismatch = Vec::new();
    if result.solution_arcs != cert.solution_arcs {
        mismatch.push("solution arcs differ from certificate".to_string());
    }
    if result.total_cost != inst.cost_of(&result.solution_arcs) {
        mismatch.push(format!("reported cost {} is not the cost of the solution", result.total_cost));
    }
    if result.dual_lower_bound != report.lower_bound {
        mismatch.push(format!("reported LB {} vs certificate {}", result.dual_lower_bound, report.lower_bound));
    }
    if result.harmonic_bound != report.bound {
        mismatch.push(format!("reported bound {} vs certificate {}", result.harmonic_bound, report.bound));
    }
    if result.phases.len() != cert.phases.len() {
        mismatch.push("phase count differs from certificate".to_string());
    }
    report.checks.push(Check { name: "result_consistency", failures: mismatch });
    report
}

/// Verifies a certificate against an instance using nothing but the
/// instance and the certificate's numbers.
pub fn verify_certificate(inst: &Instance, cert: &DualCertificate) -> VerifyReport {
    let mut f = Findings::default();
    let n = inst.node_count();
    let k = inst.terminals().len();

    let fp = InstanceFingerprint::of(inst);
    if cert.instance != fp {
        f.instance_match.push(format!(
            "certificate is for an instance with {} nodes / {} arcs / {} terminals (digest {}), got {} / {} / {} ({})",
            cert.instance.nodes,
            cert.instance.arcs,
            cert.instance.terminals,
            cert.instance.sha256,
            fp.nodes,
            fp.arcs,
            fp.terminals,
            fp.sha256
        ));
    }

    let arc_ok = |a: ArcId| a.0 < inst.arc_count();
    let mut prev_ell_after: Option<usize> = None;
    let mut all_added: BTreeSet<ArcId> = BTreeSet::new();
    let mut added_total = Rational::zero();

    for (p, ph) in cert.phases.iter().enumerate() {
        let tag = |msg: String| format!("phase {}: {msg}", p + 1);
        // shape
        let mut shape_ok = true;
        let mut bad = |f: &mut Findings, msg: String| {
            f.structure.push(tag(msg));
            shape_ok = false;
        };
        if ph.moats.len() != ph.ell || ph.ell == 0 {
            bad(&mut f, format!("ell = {} but {} moats", ph.ell, ph.moats.len()));
        }
        if ph.delta.is_negative() {
            bad(&mut f, format!("negative Δ {}", ph.delta));
        }
        if !arc_ok(ph.tight_arc) {
            bad(&mut f, "tight arc out of range".into());
        }
        if ph.body_index > ph.ell {
            bad(&mut f, format!("body index {} > ell", ph.body_index));
        }
        if ph.absorbed.is_empty()
            || ph.absorbed.iter().any(|&i| i == 0 || i > ph.ell || i == ph.body_index)
            || ph.absorbed.windows(2).any(|w| w[0] >= w[1])
        {
            bad(&mut f, format!("invalid absorbed set {:?}", ph.absorbed));
        }
        if let Some(&a) = ph.added_arcs.iter().find(|a| !arc_ok(**a)) {
            bad(&mut f, format!("added arc {a} out of range"));
        }
        match prev_ell_after {
            None if ph.ell > k => bad(&mut f, format!("first phase has ell {} > k = {k}", ph.ell)),
            Some(prev) if ph.ell > prev => {
                bad(&mut f, format!("ell {} exceeds previous phase's remainder {prev}", ph.ell))
            }
            _ => {}
        }
        let mut heads = BTreeSet::new();
        for m in &ph.moats {
            if m.head.0 >= n || !inst.is_terminal(m.head) {
                bad(&mut f, format!("moat head {} is not a terminal", m.head));
            } else if !heads.insert(m.head) {
                bad(&mut f, format!("moat head {} repeated", m.head));
            }
            if m.entries.get(&m.head) != Some(&Rational::zero()) {
                bad(&mut f, format!("head {} does not enter its moat at time 0", m.head));
            }
            for (v, e) in &m.entries {
                if v.0 >= n {
                    bad(&mut f, format!("node {v} out of range"));
                } else if e.is_negative() || e > &ph.delta {
                    bad(&mut f, format!("entry time {e} of node {v} outside [0, Δ]"));
                }
            }
        }
        prev_ell_after = Some(ph.ell.saturating_sub(ph.absorbed.len()));
        if !shape_ok {
            continue;
        }

        // dense entry table for this phase
        let mut entry: Vec<Vec<Option<&Rational>>> = vec![vec![None; n]; ph.ell];
        let mut moats_at: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, m) in ph.moats.iter().enumerate() {
            for (v, e) in &m.entries {
                entry[i][v.0] = Some(e);
                moats_at[v.0].push(i);
            }
        }
        let load = |a: ArcId| -> Rational {
            let arc = inst.arc(a);
            let mut total = Rational::zero();
            for &i in &moats_at[arc.head.0] {
                let ev = entry[i][arc.head.0].unwrap();
                let eu = match entry[i][arc.tail.0] {
                    Some(e) if e < &ph.delta => e,
                    _ => &ph.delta,
                };
                if eu > ev {
                    total += &(eu - ev);
                }
            }
            total
        };

        // (a) no arc carries more dual than its cost
        for a in inst.arc_ids() {
            let l = load(a);
            if &l > inst.cost(a) {
                f.dual_feasibility.push(tag(format!("arc {a} carries {l} > cost {}", inst.cost(a))));
            }
        }
        // (b) every dual set avoids the root
        for (i, m) in ph.moats.iter().enumerate() {
            if entry[i][inst.root().0].is_some() {
                f.root_excluded.push(tag(format!("moat of {} contains the root", m.head)));
            }
        }
        // (c) each moat exists for exactly Δ, so the value is ell * Δ
        let value: Rational = ph
            .moats
            .iter()
            .map(|m| &ph.delta - m.entries.get(&m.head).unwrap())
            .sum();
        if value != &ph.delta * ph.ell as i64 {
            f.dual_value.push(tag(format!("dual value {value} != ell * Δ")));
        }
        // (d) purchased cost within the phase allowance
        let ell_after = ph.ell - ph.absorbed.len();
        let added = inst.cost_of(&ph.added_arcs);
        let allowance = &(&ph.delta * 2) * (ph.ell - ell_after) as i64;
        if added > allowance {
            f.phase_cost_bound.push(tag(format!("added cost {added} > 2 Δ (ell - ell') = {allowance}")));
        }
        for &a in &ph.added_arcs {
            if !all_added.insert(a) {
                f.cost_accounting.push(tag(format!("arc {a} bought twice")));
            }
        }
        added_total += &added;

        // stopping arc: tight, and its head lies exactly in the absorbed moats
        let tight = inst.arc(ph.tight_arc);
        let tight_load = load(ph.tight_arc);
        if &tight_load != inst.cost(ph.tight_arc) {
            f.tight_arc.push(tag(format!("arc {} carries {tight_load}, cost {}", ph.tight_arc, tight.cost)));
        }
        let holders: Vec<usize> = (0..ph.ell)
            .filter(|&i| entry[i][tight.head.0].is_some())
            .map(|i| i + 1)
            .filter(|&i| i != ph.body_index)
            .collect();
        if holders != ph.absorbed {
            f.tight_arc.push(tag(format!(
                "head of arc {} lies in moats {holders:?}, absorbed set is {:?}",
                ph.tight_arc, ph.absorbed
            )));
        }
        if !ph.added_arcs.contains(&ph.tight_arc) && !inst.cost(ph.tight_arc).is_zero() {
            f.tight_arc.push(tag(format!("tight arc {} was not bought", ph.tight_arc)));
        }

        // every entry time is explained by a tight arc into an earlier member
        for (i, m) in ph.moats.iter().enumerate() {
            let mut justified = vec![false; n];
            justified[m.head.0] = true;
            let mut stack = vec![m.head];
            while let Some(x) = stack.pop() {
                let ex = entry[i][x.0].unwrap();
                for &a in inst.in_arcs(x) {
                    let w = inst.arc(a).tail;
                    if justified[w.0] {
                        continue;
                    }
                    if let Some(ew) = entry[i][w.0] {
                        if &(ex + inst.cost(a)) == ew {
                            justified[w.0] = true;
                            stack.push(w);
                        }
                    }
                }
            }
            for v in m.entries.keys() {
                if !justified[v.0] {
                    f.entry_witness.push(tag(format!(
                        "entry time of {v} in moat of {} has no tight witness path",
                        m.head
                    )));
                }
            }
        }
    }

    // (e) the solution connects every terminal
    if let Some(&a) = cert.solution_arcs.iter().find(|a| !arc_ok(**a)) {
        f.structure.push(format!("solution arc {a} out of range"));
    } else {
        let reached = reachable(inst, &[inst.root()], |a| cert.solution_arcs.contains(&a));
        for t in inst.terminals() {
            if !reached[t.0] {
                f.feasibility.push(format!("terminal {t} unreachable"));
            }
        }
        let cost = inst.cost_of(&cert.solution_arcs);
        if cost != cert.claimed_cost {
            f.cost_accounting.push(format!("claimed cost {} but solution arcs cost {cost}", cert.claimed_cost));
        }
        if let Some(a) = all_added.iter().find(|a| !cert.solution_arcs.contains(a)) {
            f.cost_accounting.push(format!("bought arc {a} missing from the solution"));
        }
        if let Some(a) =
            cert.solution_arcs.iter().find(|a| !all_added.contains(a) && !inst.cost(**a).is_zero())
        {
            f.cost_accounting.push(format!("solution arc {a} with positive cost was never bought"));
        }
        if added_total != cost {
            f.cost_accounting.push(format!("phases bought {added_total}, solution costs {cost}"));
        }
    }
    // (f) the approximation guarantee
    let lower_bound = dual_lower_bound(cert);
    let bound = &(&harmonic(k) * 2) * &lower_bound;
    if cert.claimed_cost > bound {
        f.approximation_bound.push(format!("claimed cost {} > 2 H_k LB = {bound}", cert.claimed_cost));
    }

    let Findings {
        instance_match,
        structure,
        dual_feasibility,
        root_excluded,
        dual_value,
        phase_cost_bound,
        tight_arc,
        entry_witness,
        cost_accounting,
        feasibility,
        approximation_bound,
    } = f;
    VerifyReport {
        checks: vec![
            Check { name: "instance_match", failures: instance_match },
            Check { name: "structure", failures: structure },
            Check { name: "dual_feasibility", failures: dual_feasibility },
            Check { name: "root_excluded", failures: root_excluded },
            Check { name: "dual_value", failures: dual_value },
            Check { name: "phase_cost_bound", failures: phase_cost_bound },
            Check { name: "tight_arc", failures: tight_arc },
            Check { name: "entry_witness", failures: entry_witness },
            Check { name: "cost_accounting", failures: cost_accounting },
            Check { name: "feasibility", failures: feasibility },
            Check { name: "approximation_bound", failures: approximation_bound },
        ],
        lower_bound,
        bound,
    }
}

/// On-disk shape: 1-based ids, fractions as strings.
mod wire {
    use super::*;

    #[derive(Serialize, Deserialize)]
    pub struct Certificate {
        pub version: u32,
        pub instance: InstanceFingerprint,
        pub claimed_cost: Rational,
        pub solution_arcs: Vec<usize>,
        pub phases: Vec<Phase>,
    }

    #[derive(Serialize, Deserialize)]
    pub struct Phase {
        pub ell: usize,
        pub delta: Rational,
        pub tight_arc: usize,
        pub body_index: usize,
        pub absorbed: Vec<usize>,
        pub added_arcs: Vec<usize>,
        pub moats: Vec<Moat>,
    }

    #[derive(Serialize, Deserialize)]
    pub struct Moat {
        pub head: usize,
        pub entries: Vec<(usize, Rational)>,
    }

    fn zero_based(label: usize, what: &str) -> Result<usize> {
        label.checked_sub(1).ok_or_else(|| Error::Certificate(format!("{what} id 0 (ids are 1-based)")))
    }

    impl From<&DualCertificate> for Certificate {
        fn from(c: &DualCertificate) -> Self {
            Certificate {
                version: CERTIFICATE_VERSION,
                instance: c.instance.clone(),
                claimed_cost: c.claimed_cost.clone(),
                solution_arcs: c.solution_arcs.iter().map(|a| a.label()).collect(),
                phases: c
                    .phases
                    .iter()
                    .map(|p| Phase {
                        ell: p.ell,
                        delta: p.delta.clone(),
                        tight_arc: p.tight_arc.label(),
                        body_index: p.body_index,
                        absorbed: p.absorbed.clone(),
                        added_arcs: p.added_arcs.iter().map(|a| a.label()).collect(),
                        moats: p
                            .moats
                            .iter()
                            .map(|m| Moat {
                                head: m.head.label(),
                                entries: m.entries.iter().map(|(v, e)| (v.label(), e.clone())).collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            }
        }
    }

    impl TryFrom<Certificate> for DualCertificate {
        type Error = Error;

        fn try_from(c: Certificate) -> Result<Self> {
            if c.version != CERTIFICATE_VERSION {
                return Err(Error::Certificate(format!("unsupported version {}", c.version)));
            }
            let arcs = |ids: &[usize]| -> Result<BTreeSet<ArcId>> {
                ids.iter().map(|&a| zero_based(a, "arc").map(ArcId)).collect()
            };
            let mut phases = Vec::with_capacity(c.phases.len());
            for p in c.phases {
                let mut moats = Vec::with_capacity(p.moats.len());
                for m in p.moats {
                    let mut entries = BTreeMap::new();
                    for (v, e) in m.entries {
                        if entries.insert(NodeId(zero_based(v, "node")?), e).is_some() {
                            return Err(Error::Certificate(format!("node {v} listed twice in a moat")));
                        }
                    }
                    moats.push(CertMoat { head: NodeId(zero_based(m.head, "node")?), entries });
                }
                phases.push(CertPhase {
                    ell: p.ell,
                    delta: p.delta,
                    moats,
                    tight_arc: ArcId(zero_based(p.tight_arc, "arc")?),
                    body_index: p.body_index,
                    absorbed: p.absorbed,
                    added_arcs: arcs(&p.added_arcs)?,
                });
            }
            Ok(DualCertificate {
                instance: c.instance,
                phases,
                solution_arcs: arcs(&c.solution_arcs)?,
                claimed_cost: c.claimed_cost,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, Arc};
    use crate::solver::solve;

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
    fn fresh_certificates_verify() {
        for inst in [parse_instance("Nodes 2\nA 1 2 5\nRoot 1\nT 2\n").unwrap(), e2()] {
            let res = solve(&inst).unwrap();
            let report = verify(&inst, &res);
            assert!(report.ok(), "{report}");
            assert_eq!(report.lower_bound, res.dual_lower_bound);
        }
    }

    #[test]
    fn lower_bounds() {
        let inst = parse_instance("Nodes 2\nA 1 2 5\nRoot 1\nT 2\n").unwrap();
        assert_eq!(dual_lower_bound(&solve(&inst).unwrap().certificate), Rational::from_integer(5));
        assert_eq!(dual_lower_bound(&solve(&e2()).unwrap().certificate), Rational::from_integer(2));
    }

    #[test]
    fn json_round_trip() {
        let inst = e2();
        let cert = solve(&inst).unwrap().certificate;
        let text = cert.to_json();
        assert!(text.contains("\"version\": 1"));
        assert_eq!(DualCertificate::from_json(&text).unwrap(), cert);
    }

    #[test]
    fn lowered_entry_time_is_caught() {
        let inst = e2();
        let mut cert = solve(&inst).unwrap().certificate;
        // s1 (node 1) entered moat of b at 0; pretend it never left r's reach
        let moat = &mut cert.phases[1].moats[0];
        assert_eq!(moat.head, NodeId(5));
        moat.entries.insert(NodeId(3), Rational::new(-1, 2));
        let report = verify_certificate(&inst, &cert);
        assert!(!report.ok());
        assert!(report.check("structure").is_some_and(|c| !c.ok()));
    }

    #[test]
    fn raised_delta_overloads_tight_arc() {
        let inst = e2();
        let mut cert = solve(&inst).unwrap().certificate;
        cert.phases[0].delta = Rational::new(11, 10);
        let report = verify_certificate(&inst, &cert);
        assert!(report.failed().contains(&"dual_feasibility"), "{report}");
    }

    #[test]
    fn lowered_claimed_cost_is_flagged() {
        let inst = e2();
        let mut cert = solve(&inst).unwrap().certificate;
        cert.claimed_cost = Rational::new(3, 2);
        let report = verify_certificate(&inst, &cert);
        assert_eq!(report.failed(), vec!["cost_accounting"]);
    }

    #[test]
    fn wrong_instance_is_flagged() {
        let cert = solve(&e2()).unwrap().certificate;
        let other = parse_instance("Nodes 2\nA 1 2 5\nRoot 1\nT 2\n").unwrap();
        let report = verify_certificate(&other, &cert);
        assert!(report.failed().contains(&"instance_match"));
    }

    #[test]
    fn bad_json_is_an_error() {
        assert!(DualCertificate::from_json("{").is_err());
        let cert = solve(&e2()).unwrap().certificate;
        let text = cert.to_json().replace("\"version\": 1", "\"version\": 2");
        assert!(DualCertificate::from_json(&text).is_err());
    }
}
