//! Weighted measures and the Hall-type stability-region membership tests.
//!
//! All checks enumerate subsets with exact arithmetic: the regions are open
//! sets defined by strict inequalities, and equality cases must be decided
//! exactly, never with tolerances. The enumeration is exponential by nature;
//! callers get a resource error beyond [`ENUMERATION_NODE_LIMIT`] nodes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, ENUMERATION_NODE_LIMIT};
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;

/// Sums the weights incident to each node; a self-loop contributes its
/// weight exactly once. No full-support validation.
pub fn weighted_values(g: &Multigraph, w: &EdgeWeights) -> Result<Vec<Rat>> {
    if w.len() != g.edge_count() {
        return Err(Error::input(format!(
            "weights must be keyed exactly on the {} edges of the graph, got {}",
            g.edge_count(),
            w.len()
        )));
    }
    Ok((0..g.node_count())
        .map(|i| g.adjacency(i).iter().map(|&(_, e)| w.get(e)).sum())
        .collect())
}

/// The weighted measure `mu^alpha(i) = sum of alpha over edges at i`.
pub fn weighted_measure(g: &Multigraph, w: &EdgeWeights) -> Result<NodeMeasure> {
    NodeMeasure::new(weighted_values(g, w)?)
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub subset: Vec<usize>,
    pub mu_u: Rat,
    pub mu_eu: Rat,
}

#[derive(Debug, Clone)]
pub struct RegionVerdict {
    pub member: bool,
    pub violation: Option<Violation>,
    /// Region checks never construct weights (see the decompose module);
    /// the field is populated when a verdict is derived from a
    /// decomposition.
    pub witness: Option<EdgeWeights>,
}

impl RegionVerdict {
    fn member() -> RegionVerdict {
        RegionVerdict {
            member: true,
            violation: None,
            witness: None,
        }
    }

    fn rejected(v: Violation) -> RegionVerdict {
        RegionVerdict {
            member: false,
            violation: Some(v),
            witness: None,
        }
    }

    pub fn to_json(&self, g: &Multigraph) -> serde_json::Value {
        let violation = match &self.violation {
            None => serde_json::Value::Null,
            Some(v) => serde_json::json!({
                "subset": v.subset.iter().map(|&i| g.name(i)).collect::<Vec<_>>(),
                "mu_U": v.mu_u.to_string(),
                "mu_EU": v.mu_eu.to_string(),
            }),
        };
        serde_json::json!({ "member": self.member, "violation": violation })
    }
}

fn guard_enumeration(g: &Multigraph) -> Result<()> {
    if g.node_count() > ENUMERATION_NODE_LIMIT {
        return Err(Error::resource(format!(
            "subset enumeration supports at most {ENUMERATION_NODE_LIMIT} nodes, graph has {}",
            g.node_count()
        )));
    }
    Ok(())
}

fn mask_indices(mask: u32) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

pub(crate) fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | (1 << i))
}

/// Subset tables: for every mask, the measure mass and the neighborhood.
struct SubsetTables {
    mu: Vec<Rat>,
    eu: Vec<u32>,
}

impl SubsetTables {
    fn build(g: &Multigraph, mu: &NodeMeasure) -> Result<SubsetTables> {
        let n = g.node_count();
        let masks = g.neighbor_masks()?;
        let size = 1usize << n;
        let mut mu_t = vec![Rat::zero(); size];
        let mut eu_t = vec![0u32; size];
        for m in 1..size {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            mu_t[m] = &mu_t[rest] + mu.get(low);
            eu_t[m] = eu_t[rest] | masks[low];
        }
        Ok(SubsetTables { mu: mu_t, eu: eu_t })
    }

    fn slack(&self, mask: u32) -> Rat {
        &self.mu[mask as usize] - &self.mu[self.eu[mask as usize] as usize]
    }
}

/// Tracks the subset maximizing `mu(U) - mu(E(U))`; ties are broken by the
/// lexicographically smallest sorted index sequence.
struct WorstSubset {
    best: Option<(Rat, u32)>,
}

impl WorstSubset {
    fn new() -> WorstSubset {
        WorstSubset { best: None }
    }

    fn offer(&mut self, slack: Rat, mask: u32) {
        match &self.best {
            None => self.best = Some((slack, mask)),
            Some((s, m)) => {
                if slack > *s || (slack == *s && mask_indices(mask) < mask_indices(*m)) {
                    self.best = Some((slack, mask));
                }
            }
        }
    }

    fn into_verdict(self, tables: &SubsetTables) -> RegionVerdict {
        match self.best {
            Some((slack, mask)) if !slack.is_negative() => {
                let eu = tables.eu[mask as usize];
                RegionVerdict::rejected(Violation {
                    subset: mask_indices(mask),
                    mu_u: tables.mu[mask as usize].clone(),
                    mu_eu: tables.mu[eu as usize].clone(),
                })
            }
            _ => RegionVerdict::member(),
        }
    }
}

fn check_len(g: &Multigraph, mu: &NodeMeasure) -> Result<()> {
    if mu.len() != g.node_count() {
        return Err(Error::input(format!(
            "measure has {} values but the graph has {} nodes",
            mu.len(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Membership in `N(G)`: `mu(U) < mu(E(U))` for every nonempty proper `U`.
pub fn check_ncond(g: &Multigraph, mu: &NodeMeasure) -> Result<RegionVerdict> {
    check_len(g, mu)?;
    guard_enumeration(g)?;
    let tables = SubsetTables::build(g, mu)?;
    let full = (1u32 << g.node_count()) - 1;
    let mut worst = WorstSubset::new();
    for m in 1..full {
        worst.offer(tables.slack(m), m);
    }
    Ok(worst.into_verdict(&tables))
}

/// Membership via independent sets only: `mu(I) < mu(E(I))` for every
/// independent set `I`. Agrees with [`check_ncond`] on connected
/// non-bipartite multigraphs.
pub fn check_ncond_independent(g: &Multigraph, mu: &NodeMeasure) -> Result<RegionVerdict> {
    check_len(g, mu)?;
    guard_enumeration(g)?;
    let tables = SubsetTables::build(g, mu)?;
    let mut worst = WorstSubset::new();
    for m in g.independent_sets()? {
        worst.offer(tables.slack(m), m);
    }
    Ok(worst.into_verdict(&tables))
}

/// Membership in `N_B(G)` for bipartite graphs, in the reduced form:
/// `mu(V1) = mu(V2)`, and `mu(U) < mu(E(U))` for every nonempty proper
/// subset of either side.
pub fn check_ncond_bipartite(g: &Multigraph, mu: &NodeMeasure) -> Result<RegionVerdict> {
    check_len(g, mu)?;
    guard_enumeration(g)?;
    let bip = g
        .bipartition()
        .ok_or_else(|| Error::input("graph is not bipartite"))?;
    let m1 = mu.sum_over(&bip.part1);
    let m2 = mu.sum_over(&bip.part2);
    if m1 != m2 {
        // the heavier side violates mu(U) < mu(E(U)) since E(V1) = V2
        let (side, mu_u, mu_eu) = if m1 > m2 {
            (bip.part1, m1, m2)
        } else {
            (bip.part2, m2, m1)
        };
        return Ok(RegionVerdict::rejected(Violation {
            subset: side,
            mu_u,
            mu_eu,
        }));
    }
    let tables = SubsetTables::build(g, mu)?;
    let mut worst = WorstSubset::new();
    for side in [&bip.part1, &bip.part2] {
        let side_mask = mask_of(side);
        let mut s = side_mask;
        while s != 0 {
            s = (s - 1) & side_mask;
            if s == 0 {
                break;
            }
            if s != side_mask {
                worst.offer(tables.slack(s), s);
            }
        }
    }
    Ok(worst.into_verdict(&tables))
}

/// Membership in the asymmetric region `N_{V1}(G)`: `mu(U1) < mu(E(U1))`
/// for every nonempty `U1` included in `v1` (including `v1` itself).
pub fn check_ncond_asym(g: &Multigraph, v1: &[usize], mu: &NodeMeasure) -> Result<RegionVerdict> {
    check_len(g, mu)?;
    guard_enumeration(g)?;
    let v1_mask = mask_of(v1);
    let full = (1u32 << g.node_count()) - 1;
    if v1_mask == 0 || v1_mask == full {
        return Err(Error::input(
            "the partition (V1, V2) must be nontrivial: both sides nonempty",
        ));
    }
    let tables = SubsetTables::build(g, mu)?;
    let mut worst = WorstSubset::new();
    let mut s = v1_mask;
    loop {
        worst.offer(tables.slack(s), s);
        if s == 0 {
            unreachable!();
        }
        s = (s - 1) & v1_mask;
        if s == 0 {
            break;
        }
    }
    Ok(worst.into_verdict(&tables))
}

/// The conditional measures of a bipartite measure: `mu~1 = mu/mu(V1)` on
/// `V1` and `mu~2 = mu/mu(V2)` on `V2`; each sums to one.
pub fn tilde_marginals(
    g: &Multigraph,
    mu: &NodeMeasure,
) -> Result<(BTreeMap<usize, Rat>, BTreeMap<usize, Rat>)> {
    check_len(g, mu)?;
    let bip = g
        .bipartition()
        .ok_or_else(|| Error::input("graph is not bipartite"))?;
    let marginal = |side: &[usize]| -> BTreeMap<usize, Rat> {
        let total = mu.sum_over(side);
        side.iter().map(|&i| (i, mu.get(i) / &total)).collect()
    };
    Ok((marginal(&bip.part1), marginal(&bip.part2)))
}
