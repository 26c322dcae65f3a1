//! Cross-module equivalence harness: enumerates all small connected
//! multigraphs, draws measures both inside and outside the regions by
//! construction, and checks that the subset test, the independent-set test
//! and the constructive decomposition agree instance by instance, with
//! every certificate re-validated exactly.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decompose::{
    decompose_asym, find_weights, validate_certificate, AsymOutcome, DecomposeOutcome,
};
use crate::error::{Error, Result};
use crate::flow::{maxflow_decompose, MaxflowOutcome};
use crate::graph::Multigraph;
use crate::measure::NodeMeasure;
use crate::rat::Rat;
use crate::stability::{
    check_ncond, check_ncond_asym, check_ncond_bipartite, check_ncond_independent,
    weighted_values, RegionVerdict,
};

/// Hard guard on the enumeration size.
pub const MAX_VERIFY_NODES: usize = 6;

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub graphs: usize,
    pub instances: usize,
    pub members: usize,
    pub non_members: usize,
    pub discrepancies: Vec<String>,
    pub certificate_failures: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.discrepancies.is_empty() && self.certificate_failures.is_empty()
    }

    fn absorb(&mut self, other: VerifyReport) {
        self.graphs += other.graphs;
        self.instances += other.instances;
        self.members += other.members;
        self.non_members += other.non_members;
        self.discrepancies.extend(other.discrepancies);
        self.certificate_failures.extend(other.certificate_failures);
    }
}

fn guard(max_nodes: usize) -> Result<()> {
    if max_nodes > MAX_VERIFY_NODES {
        return Err(Error::resource(format!(
            "the verification harness enumerates at most {MAX_VERIFY_NODES} nodes, asked for {max_nodes}"
        )));
    }
    if max_nodes < 2 {
        return Err(Error::input("need at least two nodes"));
    }
    Ok(())
}

/// All connected labeled multigraphs on exactly `n` named nodes `1..=n`
/// (plain labeled enumeration, no isomorphism reduction). Self-loop
/// patterns multiply the loop-free connected graphs when requested.
pub fn enumerate_connected_multigraphs(n: usize, with_loops: bool) -> Vec<Multigraph> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    let np = pairs.len();
    let loop_patterns: u32 = if with_loops { 1 << n } else { 1 };
    let mut out = Vec::new();
    for edge_set in 0..(1u32 << np) {
        // connectivity over the non-loop edges
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if edge_set >> b & 1 == 1 {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                    components -= 1;
                }
            }
        }
        if components != 1 {
            continue;
        }
        for loops in 0..loop_patterns {
            let mut named: Vec<(String, String)> = Vec::new();
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if edge_set >> b & 1 == 1 {
                    named.push(((i + 1).to_string(), (j + 1).to_string()));
                }
            }
            for v in 0..n {
                if loops >> v & 1 == 1 {
                    named.push(((v + 1).to_string(), (v + 1).to_string()));
                }
            }
            out.push(Multigraph::from_named_edges(&named).expect("connected by construction"));
        }
    }
    out
}

fn graphs_up_to(max_nodes: usize, with_loops: bool) -> Vec<Multigraph> {
    (2..=max_nodes)
        .flat_map(|n| enumerate_connected_multigraphs(n, with_loops))
        .collect()
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(rng.random_range(1..=24), 24)
}

/// Measures both inside and outside the region by construction, plus plain
/// random ones. Inside: a weighted measure of random strict weights.
/// Outside: a random measure inflated on an independent set until it
/// violates the subset condition (when an independent set exists).
fn measure_batch(g: &Multigraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<NodeMeasure> {
    let n = g.node_count();
    let m = g.edge_count();
    let independent = g.independent_sets().unwrap_or_default();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mu = match k % 3 {
            0 => {
                let alpha: Vec<Rat> = (0..m).map(|_| small_rat(rng)).collect();
                let w = crate::measure::EdgeWeights::strict(g, alpha).expect("positive");
                NodeMeasure::new(weighted_values(g, &w).expect("full support"))
                    .expect("weighted measures have full support")
            }
            1 if !independent.is_empty() => {
                let base: Vec<Rat> = (0..n).map(|_| small_rat(rng)).collect();
                let mu = NodeMeasure::new(base).expect("positive");
                let set = independent[rng.random_range(0..independent.len())];
                let members: Vec<usize> = (0..n).filter(|&i| set >> i & 1 == 1).collect();
                let eu = g.neighborhood(&members).expect("valid set");
                let factor =
                    (mu.sum_over(&eu) / mu.sum_over(&members)) * Rat::new(9, 8);
                let values: Vec<Rat> = (0..n)
                    .map(|i| {
                        if set >> i & 1 == 1 {
                            mu.get(i) * &factor
                        } else {
                            mu.get(i).clone()
                        }
                    })
                    .collect();
                NodeMeasure::new(values).expect("positive scaling")
            }
            _ => NodeMeasure::new((0..n).map(|_| small_rat(rng)).collect()).expect("positive"),
        };
        out.push(mu);
    }
    out
}

fn describe(g: &Multigraph, mu: &NodeMeasure) -> String {
    let mut s = String::from("graph [");
    for e in g.edges() {
        let _ = write!(s, "{} {}; ", g.name(e.u), g.name(e.v));
    }
    let _ = write!(s, "] measure [");
    for i in 0..g.node_count() {
        let _ = write!(s, "{}={}; ", g.name(i), mu.get(i));
    }
    s.push(']');
    s
}

fn check_violation(
    g: &Multigraph,
    mu: &NodeMeasure,
    verdict: &RegionVerdict,
    report: &mut VerifyReport,
    context: &str,
) {
    match &verdict.violation {
        None => report.certificate_failures.push(format!(
            "{context}: non-member without violation: {}",
            describe(g, mu)
        )),
        Some(v) => {
            let eu = g.neighborhood(&v.subset).expect("valid subset");
            let mu_u = mu.sum_over(&v.subset);
            let mu_eu = mu.sum_over(&eu);
            if mu_u != v.mu_u || mu_eu != v.mu_eu || mu_u < mu_eu {
                report.certificate_failures.push(format!(
                    "{context}: violation does not verify: {}",
                    describe(g, mu)
                ));
            }
        }
    }
}

/// On connected non-bipartite multigraphs the subset condition,
/// the independent-set condition and decomposability coincide.
pub fn verify_general(max_nodes: usize, per_graph: usize, seed: u64) -> Result<VerifyReport> {
    guard(max_nodes)?;
    let graphs: Vec<Multigraph> = graphs_up_to(max_nodes, true)
        .into_iter()
        .filter(|g| g.bipartition().is_none())
        .collect();
    let reports: Vec<VerifyReport> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(gi as u64);
            let mut rep = VerifyReport {
                graphs: 1,
                ..VerifyReport::default()
            };
            for mu in measure_batch(g, per_graph, &mut rng) {
                rep.instances += 1;
                let by_subsets = check_ncond(g, &mu).expect("within guard");
                let by_independent = check_ncond_independent(g, &mu).expect("within guard");
                let decomposed = find_weights(g, &mu).expect("valid input");
                let member = by_subsets.member;
                if member {
                    rep.members += 1;
                } else {
                    rep.non_members += 1;
                }
                if by_independent.member != member || decomposed.is_member() != member {
                    rep.discrepancies.push(format!(
                        "subsets={} independent={} weights={}: {}",
                        member,
                        by_independent.member,
                        decomposed.is_member(),
                        describe(g, &mu)
                    ));
                    continue;
                }
                match &decomposed {
                    DecomposeOutcome::Member { weights, epsilon } => {
                        let back = weighted_values(g, weights).expect("same graph");
                        if back != mu.values() || !epsilon.is_positive() {
                            rep.certificate_failures.push(format!(
                                "weights do not reproduce the measure: {}",
                                describe(g, &mu)
                            ));
                        }
                    }
                    DecomposeOutcome::Boundary { weights } => {
                        let back = weighted_values(g, weights).expect("same graph");
                        if back != mu.values()
                            || weights.values().iter().all(Rat::is_positive)
                        {
                            rep.certificate_failures.push(format!(
                                "boundary weights inconsistent: {}",
                                describe(g, &mu)
                            ));
                        }
                    }
                    DecomposeOutcome::NotMember { certificate } => {
                        if let Err(e) = validate_certificate(g, &mu, certificate) {
                            rep.certificate_failures.push(format!(
                                "farkas certificate invalid ({e}): {}",
                                describe(g, &mu)
                            ));
                        }
                    }
                }
                if !member {
                    check_violation(g, &mu, &by_subsets, &mut rep, "ncond");
                    check_violation(g, &mu, &by_independent, &mut rep, "ncond-independent");
                }
            }
            rep
        })
        .collect();
    let mut total = VerifyReport::default();
    for r in reports {
        total.absorb(r);
    }
    Ok(total)
}

/// Bipartite case: the reduced subset-and-balance condition coincides
/// with decomposability, and members split their mass evenly.
pub fn verify_bipartite(max_nodes: usize, per_graph: usize, seed: u64) -> Result<VerifyReport> {
    guard(max_nodes)?;
    let graphs: Vec<Multigraph> = graphs_up_to(max_nodes, false)
        .into_iter()
        .filter(|g| g.bipartition().is_some())
        .collect();
    let reports: Vec<VerifyReport> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_b1b1);
            rng.set_stream(gi as u64);
            let bip = g.bipartition().expect("filtered bipartite");
            let mut rep = VerifyReport {
                graphs: 1,
                ..VerifyReport::default()
            };
            for mu in measure_batch(g, per_graph, &mut rng) {
                rep.instances += 1;
                let by_region = check_ncond_bipartite(g, &mu).expect("bipartite");
                let decomposed = find_weights(g, &mu).expect("valid input");
                let member = by_region.member;
                if member {
                    rep.members += 1;
                } else {
                    rep.non_members += 1;
                }
                if decomposed.is_member() != member {
                    rep.discrepancies.push(format!(
                        "region={} weights={}: {}",
                        member,
                        decomposed.is_member(),
                        describe(g, &mu)
                    ));
                    continue;
                }
                if let DecomposeOutcome::Member { weights, .. } = &decomposed {
                    let back = weighted_values(g, weights).expect("same graph");
                    let balanced = mu.sum_over(&bip.part1) == mu.sum_over(&bip.part2);
                    if back != mu.values() || !balanced {
                        rep.certificate_failures.push(format!(
                            "bipartite member inconsistent: {}",
                            describe(g, &mu)
                        ));
                    }
                } else if let DecomposeOutcome::NotMember { certificate } = &decomposed {
                    if let Err(e) = validate_certificate(g, &mu, certificate) {
                        rep.certificate_failures.push(format!(
                            "farkas certificate invalid ({e}): {}",
                            describe(g, &mu)
                        ));
                    }
                }
                if !member {
                    check_violation(g, &mu, &by_region, &mut rep, "ncond-bipartite");
                }
            }
            rep
        })
        .collect();
    let mut total = VerifyReport::default();
    for r in reports {
        total.absorb(r);
    }
    Ok(total)
}

/// Asymmetric case: over every nontrivial partition, the one-sided
/// subset condition coincides with the looped decomposition; on bipartite
/// instances whose side is the designated partition, the flow construction
/// agrees as well.
pub fn verify_asym(max_nodes: usize, per_partition: usize, seed: u64) -> Result<VerifyReport> {
    guard(max_nodes)?;
    let graphs: Vec<Multigraph> = graphs_up_to(max_nodes, false);
    let reports: Vec<VerifyReport> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5_0f0f);
            rng.set_stream(gi as u64);
            let n = g.node_count();
            let bip = g.bipartition();
            let mut rep = VerifyReport {
                graphs: 1,
                ..VerifyReport::default()
            };
            let full = (1u32 << n) - 1;
            for v1_mask in 1..full {
                let v1: Vec<usize> = (0..n).filter(|&i| v1_mask >> i & 1 == 1).collect();
                for k in 0..per_partition {
                    rep.instances += 1;
                    let mu = asym_measure(g, &v1, k, &mut rng);
                    let by_region = check_ncond_asym(g, &v1, &mu).expect("nontrivial");
                    let decomposed = decompose_asym(g, &v1, &mu).expect("graph input");
                    let member = by_region.member;
                    if member {
                        rep.members += 1;
                    } else {
                        rep.non_members += 1;
                    }
                    if decomposed.is_member() != member {
                        rep.discrepancies.push(format!(
                            "asym region={} decompose={} v1={v1:?}: {}",
                            member,
                            decomposed.is_member(),
                            describe(g, &mu)
                        ));
                        continue;
                    }
                    match &decomposed {
                        AsymOutcome::Member { weights, slack, .. } => {
                            let back = weighted_values(g, weights).expect("same graph");
                            let ok_v1 = v1.iter().all(|&i| back[i] == *mu.get(i));
                            let ok_v2 = slack.iter().all(|(&j, s)| {
                                s.is_positive() && &back[j] + s == *mu.get(j)
                            });
                            if !ok_v1 || !ok_v2 {
                                rep.certificate_failures.push(format!(
                                    "asym weights inconsistent, v1={v1:?}: {}",
                                    describe(g, &mu)
                                ));
                            }
                        }
                        AsymOutcome::NotMember { certificate } => {
                            // independence holds in the looped graph, so the
                            // set lies in v1 and violates the side condition
                            let set = &certificate.violating_set;
                            let inside = set.iter().all(|i| v1.contains(i));
                            let eu = g.neighborhood(set).expect("valid");
                            if !inside
                                || set.is_empty()
                                || mu.sum_over(set) < mu.sum_over(&eu)
                            {
                                rep.certificate_failures.push(format!(
                                    "asym certificate invalid, v1={v1:?}: {}",
                                    describe(g, &mu)
                                ));
                            }
                        }
                        AsymOutcome::Boundary { .. } => {}
                    }
                    // flow route on bipartite instances with the designated side
                    if let Some(b) = &bip {
                        if v1 == b.part1 || v1 == b.part2 {
                            let flow = maxflow_decompose(g, &v1, &mu).expect("bipartite");
                            if flow.is_member() != member {
                                rep.discrepancies.push(format!(
                                    "flow={} asym={} v1={v1:?}: {}",
                                    flow.is_member(),
                                    member,
                                    describe(g, &mu)
                                ));
                            } else if let MaxflowOutcome::Member { weights, delta, .. } = &flow
                            {
                                let back = weighted_values(g, weights).expect("same graph");
                                let ok_v1 = v1.iter().all(|&i| back[i] == *mu.get(i));
                                let ok_v2 = delta
                                    .iter()
                                    .all(|(&j, d)| back[j] <= *d && *d < *mu.get(j));
                                if !ok_v1 || !ok_v2 {
                                    rep.certificate_failures.push(format!(
                                        "flow weights inconsistent, v1={v1:?}: {}",
                                        describe(g, &mu)
                                    ));
                                }
                            } else if let MaxflowOutcome::NotMember { cut } = &flow {
                                if cut.mu_u < cut.mu_eu {
                                    rep.certificate_failures.push(format!(
                                        "cut certificate invalid, v1={v1:?}: {}",
                                        describe(g, &mu)
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            rep
        })
        .collect();
    let mut total = VerifyReport::default();
    for r in reports {
        total.absorb(r);
    }
    Ok(total)
}

/// Measures for the asymmetric harness: inside by construction (weighted
/// measure of the looped graph), a guaranteed violation (one `v1` node
/// inflated over its whole neighborhood), and plain random measures.
fn asym_measure(g: &Multigraph, v1: &[usize], k: usize, rng: &mut ChaCha8Rng) -> NodeMeasure {
    let n = g.node_count();
    match k % 3 {
        0 => {
            // random weights on g plus positive slack on v2
            let alpha: Vec<Rat> = (0..g.edge_count()).map(|_| small_rat(rng)).collect();
            let w = crate::measure::EdgeWeights::strict(g, alpha).expect("positive");
            let mut values = weighted_values(g, &w).expect("full support");
            for j in 0..n {
                if !v1.contains(&j) {
                    values[j] += &small_rat(rng);
                }
            }
            NodeMeasure::new(values).expect("positive")
        }
        1 => {
            let mut values: Vec<Rat> = (0..n).map(|_| small_rat(rng)).collect();
            let i = v1[rng.random_range(0..v1.len())];
            let eu = g.neighborhood(&[i]).expect("valid");
            let mass: Rat = eu.iter().map(|&x| &values[x]).sum();
            values[i] = mass + Rat::new(1, 24);
            NodeMeasure::new(values).expect("positive")
        }
        _ => NodeMeasure::new((0..n).map(|_| small_rat(rng)).collect()).expect("positive"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        // connected labeled graphs: 1 on 2 nodes, 4 on 3 nodes, 38 on 4
        assert_eq!(enumerate_connected_multigraphs(2, false).len(), 1);
        assert_eq!(enumerate_connected_multigraphs(3, false).len(), 4);
        assert_eq!(enumerate_connected_multigraphs(4, false).len(), 38);
        // loop patterns multiply by 2^n
        assert_eq!(enumerate_connected_multigraphs(3, true).len(), 4 * 8);
    }

    #[test]
    fn guard_rejects_large_enumerations() {
        assert!(verify_general(7, 1, 0).is_err());
        assert!(verify_bipartite(1, 1, 0).is_err());
    }

    #[test]
    fn small_general_harness_is_clean() {
        let rep = verify_general(3, 12, 7).unwrap();
        assert!(rep.ok(), "{:?}", rep.discrepancies);
        assert!(rep.members > 0 && rep.non_members > 0);
    }

    #[test]
    fn small_bipartite_harness_is_clean() {
        let rep = verify_bipartite(4, 12, 7).unwrap();
        assert!(rep.ok(), "{:?}", rep.discrepancies);
        assert!(rep.members > 0 && rep.non_members > 0);
    }

    #[test]
    fn small_asym_harness_is_clean() {
        let rep = verify_asym(3, 6, 7).unwrap();
        assert!(rep.ok(), "{:?}", rep.discrepancies);
        assert!(rep.members > 0 && rep.non_members > 0);
    }
}
