//! Property tests for the cross-module invariants.

use proptest::prelude::*;

use stabmatch::graph::Multigraph;
use stabmatch::measure::{EdgeWeights, NodeMeasure};
use stabmatch::rat::Rat;
use stabmatch::stability::{
    check_ncond, check_ncond_bipartite, check_ncond_independent, weighted_measure,
};
use stabmatch::walk::{check_detailed_balance, walk_from_weights, weights_from_reversible};

/// (node count, non-loop edge bits, loop bits) candidates; connectivity is
/// assumed away inside the tests.
fn graph_seed() -> impl Strategy<Value = (usize, u32, u8)> {
    (2usize..=5, any::<u32>(), any::<u8>())
}

fn build_graph(n: usize, edge_bits: u32, loop_bits: u8) -> Option<Multigraph> {
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut b = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if edge_bits >> b & 1 == 1 {
                edges.push(((i + 1).to_string(), (j + 1).to_string()));
            }
            b += 1;
        }
    }
    for v in 0..n {
        if loop_bits >> v & 1 == 1 {
            edges.push(((v + 1).to_string(), (v + 1).to_string()));
        }
    }
    let g = Multigraph::from_named_edges(&edges).ok()?;
    (g.node_count() == n).then_some(g)
}

fn weights_for(g: &Multigraph, numerators: &[i64]) -> EdgeWeights {
    let values: Vec<Rat> = (0..g.edge_count())
        .map(|e| Rat::new(numerators[e % numerators.len()], 24))
        .collect();
    EdgeWeights::strict(g, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Scaling weights scales the weighted measure, and the total mass is
    /// loops-once, edges-twice.
    #[test]
    fn weighted_measure_is_linear(
        (n, eb, lb) in graph_seed(),
        nums in proptest::collection::vec(1i64..=40, 1..=20),
        c_num in 1i64..=9,
    ) {
        let Some(g) = build_graph(n, eb, lb) else { return Ok(()); };
        let w = weights_for(&g, &nums);
        let mu = weighted_measure(&g, &w).unwrap();
        let c = Rat::new(c_num, 4);
        let scaled = weighted_measure(&g, &w.scale(&c)).unwrap();
        for i in 0..g.node_count() {
            prop_assert_eq!(scaled.get(i).clone(), mu.get(i) * &c);
        }
        let mut mass = Rat::zero();
        for (e, edge) in g.edges().iter().enumerate() {
            let factor = if edge.is_loop() { 1 } else { 2 };
            mass = &mass + &(w.get(e) * &Rat::from_int(factor));
        }
        prop_assert_eq!(mu.total().clone(), mass);
    }

    /// Weighted measures of strictly positive weights are members of the
    /// matching region: the subset and independent-set conditions on
    /// non-bipartite graphs, the balanced reduced condition on bipartite
    /// ones (where the general condition always fails: a bipartition side
    /// has zero slack).
    #[test]
    fn weighted_measures_are_members(
        (n, eb, lb) in graph_seed(),
        nums in proptest::collection::vec(1i64..=40, 1..=20),
    ) {
        let Some(g) = build_graph(n, eb, lb) else { return Ok(()); };
        let w = weights_for(&g, &nums);
        let mu = weighted_measure(&g, &w).unwrap();
        match g.bipartition() {
            None => {
                prop_assert!(check_ncond(&g, &mu).unwrap().member);
                prop_assert!(check_ncond_independent(&g, &mu).unwrap().member);
            }
            Some(bip) => {
                prop_assert!(check_ncond_bipartite(&g, &mu).unwrap().member);
                prop_assert_eq!(mu.sum_over(&bip.part1), mu.sum_over(&bip.part2));
                prop_assert!(!check_ncond(&g, &mu).unwrap().member);
            }
        }
    }

    /// The walk correspondence round-trips exactly and the weighted measure
    /// is stationary for its walk.
    #[test]
    fn walk_round_trips(
        (n, eb, lb) in graph_seed(),
        nums in proptest::collection::vec(1i64..=40, 1..=20),
    ) {
        let Some(g) = build_graph(n, eb, lb) else { return Ok(()); };
        let w = weights_for(&g, &nums);
        let mu = weighted_measure(&g, &w).unwrap();
        let p = walk_from_weights(&g, &w).unwrap();
        let report = check_detailed_balance(&g, &p, &mu);
        prop_assert!(report.balanced);
        prop_assert!(report.stationary);
        let back = weights_from_reversible(&g, &p, &mu).unwrap();
        prop_assert_eq!(back.values(), w.values());
        let p2 = walk_from_weights(&g, &back).unwrap();
        prop_assert_eq!(p2, p);
    }

    /// Normalization yields total one exactly and is idempotent.
    #[test]
    fn normalize_properties(values in proptest::collection::vec((1i64..=50, 1i64..=50), 1..=8)) {
        let vals: Vec<Rat> = values.iter().map(|&(p, q)| Rat::new(p, q)).collect();
        let mu = NodeMeasure::new(vals).unwrap();
        let bar = mu.normalize();
        prop_assert_eq!(bar.total().clone(), Rat::one());
        prop_assert_eq!(bar.normalize(), bar);
    }

    /// Serialize/parse keeps the multiset of unordered edges.
    #[test]
    fn graph_round_trip((n, eb, lb) in graph_seed()) {
        let Some(g) = build_graph(n, eb, lb) else { return Ok(()); };
        let again = Multigraph::parse(&g.serialize()).unwrap();
        let multiset = |g: &Multigraph| {
            let mut v: Vec<(String, String)> = g
                .edges()
                .iter()
                .map(|e| {
                    let a = g.name(e.u).to_string();
                    let b = g.name(e.v).to_string();
                    (a.clone().min(b.clone()), a.max(b))
                })
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(multiset(&g), multiset(&again));
    }
}
