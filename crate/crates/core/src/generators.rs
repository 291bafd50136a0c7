//! Seeded instance families.
//!
//! All randomness comes from SplitMix64 (Steele, Lea and Flood; increment
//! `0x9E3779B97F4A7C15`) seeded directly with the caller's seed, so a given
//! `(params, seed)` pair yields the same instance on every platform.

use std::collections::BTreeSet;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::instance::{reachable, Arc, Instance, NodeId};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub universe_size: usize,
    /// Elements are `0..universe_size`.
    pub sets: Vec<(BTreeSet<usize>, Rational)>,
}

impl SetCoverInstance {
    pub fn check(&self) -> Result<()> {
        let mut covered = vec![false; self.universe_size];
        for (i, (set, cost)) in self.sets.iter().enumerate() {
            if cost.is_negative() {
                return Err(Error::Contract(format!("set {i} has negative cost {cost}")));
            }
            for &e in set {
                if e >= self.universe_size {
                    return Err(Error::Contract(format!("set {i} names element {e} outside the universe")));
                }
                covered[e] = true;
            }
        }
        match covered.iter().position(|c| !c) {
            Some(e) => Err(Error::Contract(format!("element {e} is covered by no set"))),
            None => Ok(()),
        }
    }

    /// Optimum by trying every family of sets. Returns the cost and the
    /// chosen set indices.
    pub fn brute_force_opt(&self) -> Result<(Rational, Vec<usize>)> {
        self.check()?;
        let s = self.sets.len();
        if s > 24 {
            return Err(Error::Limit { what: "set count", value: s, limit: 24 });
        }
        let full: u64 = if self.universe_size == 0 { 0 } else { (1u64 << self.universe_size) - 1 };
        let masks: Vec<u64> = self.sets.iter().map(|(set, _)| set.iter().fold(0, |m, &e| m | 1 << e)).collect();
        let mut best: Option<(Rational, u32)> = None;
        for pick in 0u32..(1u32 << s) {
            let cover = (0..s).filter(|i| pick >> i & 1 == 1).fold(0, |m, i| m | masks[i]);
            if cover != full {
                continue;
            }
            let cost: Rational = (0..s).filter(|i| pick >> i & 1 == 1).map(|i| &self.sets[i].1).sum();
            if best.as_ref().is_none_or(|(b, _)| &cost < b) {
                best = Some((cost, pick));
            }
        }
        let (cost, pick) = best.expect("checked systems have a cover");
        Ok((cost, (0..s).filter(|i| pick >> i & 1 == 1).collect()))
    }
}

/// Two-layer reduction: root `r` (node 0), one Steiner node per set (nodes
/// `1..=s`) reached by an arc of the set's cost, then one terminal per
/// element with a free arc from every set containing it.
pub fn from_set_cover(sc: &SetCoverInstance) -> Result<Instance> {
    sc.check()?;
    let s = sc.sets.len();
    let element = |e: usize| s + 1 + e;
    let mut arcs: Vec<Arc> = sc.sets.iter().enumerate().map(|(i, (_, c))| Arc::new(0, i + 1, c.clone())).collect();
    for (i, (set, _)) in sc.sets.iter().enumerate() {
        arcs.extend(set.iter().map(|&e| Arc::new(i + 1, element(e), 0)));
    }
    let terminals = (0..sc.universe_size).map(element).collect();
    Ok(Instance::new(s + 1 + sc.universe_size, arcs, 0, terminals)?)
}

/// Singletons `{e_i}` at cost `1/i` plus the whole universe at `1 + 1/n`.
pub fn greedy_hard(n: usize) -> Result<SetCoverInstance> {
    if n < 2 {
        return Err(Error::Contract(format!("greedy_hard needs n >= 2, got {n}")));
    }
    let mut sets: Vec<(BTreeSet<usize>, Rational)> =
        (0..n).map(|i| (BTreeSet::from([i]), Rational::new(1, i as i64 + 1))).collect();
    sets.push(((0..n).collect(), Rational::one() + Rational::new(1, n as i64)));
    Ok(SetCoverInstance { universe_size: n, sets })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub n_terminals: usize,
    pub n_steiner: usize,
    /// Probability in `(0, 1]` that an allowed ordered pair becomes an arc.
    pub arc_density: Rational,
    /// Inclusive integer cost range.
    pub cost_range: (u64, u64),
}

impl RandomParams {
    pub fn new(n_terminals: usize, n_steiner: usize, arc_density: Rational, cost_range: (u64, u64)) -> Self {
        RandomParams { n_terminals, n_steiner, arc_density, cost_range }
    }
}

struct Draw(SplitMix64);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform in `lo..=hi` (modulo reduction; bias is irrelevant at these ranges).
    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        let span = hi - lo;
        if span == u64::MAX {
            return self.0.next_u64();
        }
        lo + self.0.next_u64() % (span + 1)
    }

    /// True with probability `threshold / 2^32`, using the top 32 bits of one draw.
    fn below(&mut self, threshold: u64) -> bool {
        (self.0.next_u64() >> 32) < threshold
    }
}

/// `ceil(p * 2^32)`, so that a 32-bit draw `x` satisfies `x < p * 2^32`
/// exactly when `x < threshold(p)`.
fn threshold(p: &Rational) -> u64 {
    let scaled = p * (1i64 << 32);
    let floor = scaled.numer() / scaled.denom();
    let floor: u64 = floor.try_into().expect("probability is at most 1");
    if scaled.is_integer() {
        floor
    } else {
        floor + 1
    }
}

/// Random quasi-bipartite instance. Node 0 is the root, nodes
/// `1..=n_terminals` are terminals, the rest are Steiner nodes. Every
/// ordered pair except Steiner to Steiner and arcs into the root is offered,
/// tails then heads in ascending order, and kept with probability
/// `arc_density`. Terminals left unreachable get a direct root arc at the
/// top of the cost range.
pub fn random_quasi_bipartite(params: &RandomParams, seed: u64) -> Result<Instance> {
    let RandomParams { n_terminals: k, n_steiner, arc_density: density, cost_range: (lo, hi) } = params;
    if density.is_negative() || density.is_zero() || density > &Rational::one() {
        return Err(Error::Contract(format!("arc density {density} is outside (0, 1]")));
    }
    if lo > hi || *hi > i64::MAX as u64 {
        return Err(Error::Contract(format!("bad cost range [{lo}, {hi}]")));
    }
    let n = 1 + k + n_steiner;
    let steiner = |v: usize| v > *k;
    let mut rng = Draw::new(seed);
    let keep = threshold(density);
    let mut arcs = Vec::new();
    for tail in 0..n {
        for head in 1..n {
            if tail == head || (steiner(tail) && steiner(head)) {
                continue;
            }
            if rng.below(keep) {
                arcs.push(Arc::new(tail, head, rng.range(*lo, *hi) as i64));
            }
        }
    }
    patch_reachability(n, arcs, (1..=*k).collect(), *hi)
}

/// Like [`random_quasi_bipartite`] but with exactly `arcs` arcs, drawn
/// uniformly without replacement from the allowed pairs (plus fallback root
/// arcs in the rare case a terminal is left unreachable).
pub fn random_with_arc_count(
    n_terminals: usize,
    n_steiner: usize,
    arcs: usize,
    cost_range: (u64, u64),
    seed: u64,
) -> Result<Instance> {
    let (lo, hi) = cost_range;
    if lo > hi || hi > i64::MAX as u64 {
        return Err(Error::Contract(format!("bad cost range [{lo}, {hi}]")));
    }
    let k = n_terminals;
    let n = 1 + k + n_steiner;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for tail in 0..n {
        for head in 1..n {
            if tail != head && !(tail > k && head > k) {
                pairs.push((tail, head));
            }
        }
    }
    if arcs > pairs.len() {
        return Err(Error::Contract(format!("{arcs} arcs requested but only {} pairs allowed", pairs.len())));
    }
    let mut rng = Draw::new(seed);
    for i in 0..arcs {
        let j = rng.range(i as u64, pairs.len() as u64 - 1) as usize;
        pairs.swap(i, j);
    }
    pairs.truncate(arcs);
    pairs.sort_unstable();
    let arcs = pairs.into_iter().map(|(t, h)| Arc::new(t, h, rng.range(lo, hi) as i64)).collect();
    patch_reachability(n, arcs, (1..=k).collect(), hi)
}

fn patch_reachability(n: usize, mut arcs: Vec<Arc>, terminals: Vec<usize>, fallback: u64) -> Result<Instance> {
    loop {
        let inst = Instance::new(n, arcs.clone(), 0, terminals.clone())?;
        let seen = reachable(&inst, &[NodeId(0)], |_| true);
        match terminals.iter().find(|&&t| !seen[t]) {
            None => return Ok(inst),
            Some(&t) => arcs.push(Arc::new(0, t, fallback as i64)),
        }
    }
}

/// One instance from the desk-scale family: `n <= 24`, `1 <= k <= 6`,
/// integer costs in `[0, 20]`. The shape is drawn from `seed` too.
pub fn desk_instance(seed: u64) -> Instance {
    let mut rng = Draw::new(seed ^ 0xD35C_0000_0000_0001);
    let k = rng.range(1, 6) as usize;
    let n_steiner = rng.range(0, (23 - k) as u64) as usize;
    let density = Rational::new(rng.range(1, 6) as i64, 10);
    let lo = if rng.range(0, 3) == 0 { 0 } else { 1 };
    let params = RandomParams::new(k, n_steiner, density, (lo, 20));
    random_quasi_bipartite(&params, seed).expect("desk parameters are valid")
}

/// Like [`desk_instance`] but with at most `max_arcs` arcs, small enough for
/// exhaustive search.
pub fn tiny_instance(seed: u64, max_arcs: usize) -> Instance {
    let mut rng = Draw::new(seed ^ 0x71A1_0000_0000_0002);
    loop {
        let k = rng.range(1, 4) as usize;
        let n_steiner = rng.range(0, 3) as usize;
        let density = Rational::new(rng.range(1, 5) as i64, 10);
        let lo = rng.range(0, 1);
        let params = RandomParams::new(k, n_steiner, density, (lo, 12));
        let inst = random_quasi_bipartite(&params, rng.0.next_u64()).expect("tiny parameters are valid");
        if inst.arc_count() <= max_arcs {
            return inst;
        }
    }
}

/// Random set system: `universe_size` elements, `n_sets` nonempty sets with
/// integer costs in `[0, 10]`; uncovered elements are added to a random set.
pub fn random_set_cover(universe_size: usize, n_sets: usize, seed: u64) -> Result<SetCoverInstance> {
    if universe_size == 0 || n_sets == 0 {
        return Err(Error::Contract("set cover needs at least one element and one set".into()));
    }
    let mut rng = Draw::new(seed);
    let half = threshold(&Rational::new(1, 2));
    let mut sets: Vec<(BTreeSet<usize>, Rational)> = (0..n_sets)
        .map(|_| {
            let mut set: BTreeSet<usize> = (0..universe_size).filter(|_| rng.below(half)).collect();
            if set.is_empty() {
                set.insert(rng.range(0, universe_size as u64 - 1) as usize);
            }
            (set, Rational::from_integer(rng.range(0, 10) as i64))
        })
        .collect();
    for e in 0..universe_size {
        if !sets.iter().any(|(s, _)| s.contains(&e)) {
            let i = rng.range(0, n_sets as u64 - 1) as usize;
            sets[i].0.insert(e);
        }
    }
    Ok(SetCoverInstance { universe_size, sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{serialize_instance, validate};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn e2_from_set_cover() {
        let sc = SetCoverInstance {
            universe_size: 2,
            sets: vec![
                (BTreeSet::from([0, 1]), q(3)),
                (BTreeSet::from([0]), q(1)),
                (BTreeSet::from([1]), q(1)),
            ],
        };
        let inst = from_set_cover(&sc).unwrap();
        let arcs = vec![
            Arc::new(0, 1, 3),
            Arc::new(0, 2, 1),
            Arc::new(0, 3, 1),
            Arc::new(1, 4, 0),
            Arc::new(1, 5, 0),
            Arc::new(2, 4, 0),
            Arc::new(3, 5, 0),
        ];
        assert_eq!(inst, Instance::new(6, arcs, 0, vec![4, 5]).unwrap());
        assert_eq!(sc.brute_force_opt().unwrap(), (q(2), vec![1, 2]));
    }

    #[test]
    fn uncovered_element_rejected() {
        let sc = SetCoverInstance { universe_size: 2, sets: vec![(BTreeSet::from([0]), q(1))] };
        assert!(from_set_cover(&sc).is_err());
    }

    #[test]
    fn greedy_hard_two() {
        let sc = greedy_hard(2).unwrap();
        assert_eq!(
            sc.sets,
            vec![
                (BTreeSet::from([0]), q(1)),
                (BTreeSet::from([1]), Rational::new(1, 2)),
                (BTreeSet::from([0, 1]), Rational::new(3, 2)),
            ]
        );
        assert!(greedy_hard(1).is_err());
        assert!(validate(&from_set_cover(&greedy_hard(4).unwrap()).unwrap()).ok());
    }

    #[test]
    fn full_density_offers_every_pair() {
        let params = RandomParams::new(2, 2, Rational::one(), (1, 5));
        let inst = random_quasi_bipartite(&params, 9).unwrap();
        // 5 nodes; tails: root 4, each terminal 3, each Steiner 2 (terminals only)
        assert_eq!(inst.arc_count(), 4 + 2 * 3 + 2 * 2);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = RandomParams::new(3, 5, Rational::new(3, 10), (0, 20));
        let a = serialize_instance(&random_quasi_bipartite(&params, 42).unwrap());
        let b = serialize_instance(&random_quasi_bipartite(&params, 42).unwrap());
        let c = serialize_instance(&random_quasi_bipartite(&params, 43).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..1000 {
            let inst = desk_instance(seed);
            assert!(validate(&inst).ok(), "seed {seed}");
            assert!(inst.node_count() <= 24 && (1..=6).contains(&inst.terminals().len()));
            assert!(inst.arcs().iter().all(|a| a.cost <= q(20)));
        }
        for seed in 0..100 {
            assert!(tiny_instance(seed, 18).arc_count() <= 18);
        }
    }

    #[test]
    fn sparse_generation_falls_back_to_root_arcs() {
        let params = RandomParams::new(4, 3, Rational::new(1, 1000), (2, 9));
        let inst = random_quasi_bipartite(&params, 5).unwrap();
        assert!(validate(&inst).ok());
        assert!(inst.arcs().iter().any(|a| a.tail == NodeId(0) && a.cost == q(9)));
    }

    #[test]
    fn exact_arc_count() {
        let inst = random_with_arc_count(3, 10, 40, (1, 9), 4).unwrap();
        assert_eq!(inst.arc_count(), 40);
        assert!(validate(&inst).ok());
        let again = random_with_arc_count(3, 10, 40, (1, 9), 4).unwrap();
        assert_eq!(inst, again);
        assert!(random_with_arc_count(1, 1, 100, (1, 9), 4).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(random_quasi_bipartite(&RandomParams::new(1, 1, q(0), (1, 2)), 0).is_err());
        assert!(random_quasi_bipartite(&RandomParams::new(1, 1, q(2), (1, 2)), 0).is_err());
        assert!(random_quasi_bipartite(&RandomParams::new(1, 1, q(1), (3, 2)), 0).is_err());
    }

    #[test]
    fn random_set_systems_are_valid() {
        for seed in 0..200 {
            let sc = random_set_cover(8, 6, seed).unwrap();
            sc.check().unwrap();
        }
    }
}
