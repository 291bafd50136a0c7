use proptest::prelude::*;

use quasi_dst::generators::{random_quasi_bipartite, RandomParams};
use quasi_dst::instance::{shortest_dist, Arc, Instance};
use quasi_dst::{parse_instance, serialize_instance, solve, verify, Dist, NodeId, Rational};

/// Arbitrary quasi-bipartite instance: root 0, terminals `1..=k`, Steiner
/// nodes after; fractional costs included. Reachability is not guaranteed.
fn instance() -> impl Strategy<Value = Instance> {
    (1usize..5, 0usize..5).prop_flat_map(|(k, s)| {
        let n = 1 + k + s;
        let arc = (0..n, 1..n, 0i64..30, 1i64..4)
            .prop_filter("no loops or Steiner pairs", move |(t, h, _, _)| t != h && (*t <= k || *h <= k))
            .prop_map(|(t, h, num, den)| Arc::new(t, h, Rational::new(num, den)));
        prop::collection::vec(arc, 0..25)
            .prop_map(move |arcs| Instance::new(n, arcs, 0, (1..=k).collect()).unwrap())
    })
}

/// Bellman-Ford, written independently of the library's Dijkstra.
fn bellman_ford(inst: &Instance, target: NodeId) -> Dist {
    let mut d: Vec<Option<Rational>> = vec![None; inst.node_count()];
    d[inst.root().0] = Some(Rational::zero());
    for _ in 0..inst.node_count() {
        for arc in inst.arcs() {
            if let Some(du) = d[arc.tail.0].clone() {
                let cand = &du + &arc.cost;
                if d[arc.head.0].as_ref().is_none_or(|dv| &cand < dv) {
                    d[arc.head.0] = Some(cand);
                }
            }
        }
    }
    d[target.0].clone().map_or(Dist::Inf, Dist::Finite)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialization_round_trips(inst in instance()) {
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn shortest_dist_matches_bellman_ford(inst in instance()) {
        for &t in inst.terminals() {
            let (d, path) = shortest_dist(&inst, &[inst.root()], t);
            prop_assert_eq!(&d, &bellman_ford(&inst, t));
            if let Dist::Finite(len) = d {
                prop_assert_eq!(inst.cost_of(&path), len);
            }
        }
    }

    #[test]
    fn feasible_instances_solve_and_verify(inst in instance()) {
        if quasi_dst::validate(&inst).ok() {
            let res = solve(&inst).unwrap();
            prop_assert!(verify(&inst, &res).ok());
            prop_assert!(res.total_cost <= res.harmonic_bound);
        }
    }

    #[test]
    fn fifty_node_instances_round_trip(seed in any::<u64>(), k in 1usize..10) {
        let params = RandomParams::new(k, 49 - k, Rational::new(1, 10), (0, 50));
        let inst = random_quasi_bipartite(&params, seed).unwrap();
        prop_assert_eq!(inst.node_count(), 50);
        prop_assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }
}
