//! The flow route to the asymmetric decomposition on bipartite graphs.
//!
//! For a bipartite graph with customer side `V1` and a measure in the
//! asymmetric region, a reduced pool measure `delta < mu` on `V2` is chosen
//! so that Hall's slack survives, and the decomposition is read off a
//! maximum `s-t` flow: source -> V1 arcs carry `mu(i)`, pool -> sink arcs
//! carry `delta(j)`, compatibility arcs are unbounded. The flow saturates
//! the source exactly when the measure is in the region; otherwise the
//! minimum cut is returned together with an exactly-violating subset.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;
use crate::stability::mask_of;

#[derive(Debug, Clone)]
pub enum Capacity {
    Finite(Rat),
    /// Solved with the finite bound `mu(V1) + 1`, a valid upper bound on
    /// any flow value in this network.
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

/// The `s-t` network: node 0 is the source, node `count - 1` the sink, and
/// graph node `i` maps to network node `i + 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc>,
}

#[derive(Debug, Clone)]
pub struct CutCertificate {
    /// Graph nodes on the source side of a minimum cut.
    pub source_side: Vec<usize>,
    pub capacity: Rat,
    /// Subset of `v1` with `mu(U) >= mu(E(U))`, exact.
    pub violating_set: Vec<usize>,
    pub mu_u: Rat,
    pub mu_eu: Rat,
}

#[derive(Debug, Clone)]
pub enum MaxflowOutcome {
    Member {
        /// Nonnegative weights with `mu^alpha(i) = mu(i)` on `v1` and
        /// `mu^alpha(j) <= delta(j) < mu(j)` on `v2`.
        weights: EdgeWeights,
        delta: BTreeMap<usize, Rat>,
        flow_value: Rat,
    },
    NotMember {
        cut: CutCertificate,
    },
}

impl MaxflowOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, MaxflowOutcome::Member { .. })
    }
}

/// Exact max flow by shortest augmenting paths on a dense residual matrix.
fn max_flow(n: usize, cap: &mut [Vec<Rat>], s: usize, t: usize) -> Rat {
    let mut value = Rat::zero();
    loop {
        // BFS for a shortest residual path
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v].is_positive() {
                    prev[v] = u;
                    if v == t {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return value;
        }
        let mut bottleneck: Option<Rat> = None;
        let mut v = t;
        while v != s {
            let u = prev[v];
            if bottleneck.as_ref().is_none_or(|b| cap[u][v] < *b) {
                bottleneck = Some(cap[u][v].clone());
            }
            v = u;
        }
        let b = bottleneck.expect("path has at least one arc");
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] = &cap[u][v] - &b;
            cap[v][u] = &cap[v][u] + &b;
            v = u;
        }
        value += &b;
    }
}

/// Largest `theta` in `{1/2, 1/4, ...}` with
/// `mu(U1) < (1 - theta) mu(E(U1))` for all nonempty `U1`, given the
/// minimum relative slack is positive.
fn select_theta(min_relative_slack: &Rat) -> Rat {
    let mut theta = Rat::new(1, 2);
    while &theta >= min_relative_slack {
        theta = &theta / &Rat::from_int(2);
    }
    theta
}

/// Runs the flow construction for a bipartite `g` with designated customer
/// side `v1` (which must be one side of the bipartition).
pub fn maxflow_decompose(
    g: &Multigraph,
    v1: &[usize],
    mu: &NodeMeasure,
) -> Result<MaxflowOutcome> {
    if mu.len() != g.node_count() {
        return Err(Error::input("measure does not match the graph"));
    }
    let bip = g
        .bipartition()
        .ok_or_else(|| Error::input("graph is not bipartite"))?;
    let mut v1_sorted = v1.to_vec();
    v1_sorted.sort_unstable();
    v1_sorted.dedup();
    if v1_sorted != bip.part1 && v1_sorted != bip.part2 {
        return Err(Error::input(
            "v1 must be one side of the bipartition (the customer side)",
        ));
    }
    let v2: Vec<usize> = (0..g.node_count())
        .filter(|i| !v1_sorted.contains(i))
        .collect();

    // exact Hall slack over all nonempty subsets of v1: track the worst
    // subset and the minimum relative slack (mu(EU) - mu(U)) / mu(EU)
    let v1_mask = mask_of(&v1_sorted);
    let mut worst: Option<(Rat, u32)> = None;
    let mut min_rel_slack: Option<Rat> = None;
    let mut s = v1_mask;
    loop {
        let eu = g.neighborhood_mask(s)?;
        let mu_u = mu.sum_mask(s);
        let mu_eu = mu.sum_mask(eu);
        let slack = &mu_u - &mu_eu;
        if worst.as_ref().is_none_or(|(w, _)| slack > *w) {
            worst = Some((slack.clone(), s));
        }
        let rel = (&mu_eu - &mu_u) / &mu_eu;
        if min_rel_slack.as_ref().is_none_or(|m| rel < *m) {
            min_rel_slack = Some(rel);
        }
        s = (s - 1) & v1_mask;
        if s == 0 {
            break;
        }
    }
    let (worst_slack, worst_mask) = worst.expect("v1 nonempty");
    let member = worst_slack.is_negative();

    // delta(j) = (1 - theta) mu(j); for a non-member any theta in (0,1)
    // keeps the cut below mu(V1)
    let theta = if member {
        select_theta(&min_rel_slack.expect("v1 nonempty"))
    } else {
        Rat::new(1, 2)
    };
    let one_minus_theta = Rat::one() - &theta;
    let delta: BTreeMap<usize, Rat> = v2
        .iter()
        .map(|&j| (j, mu.get(j) * &one_minus_theta))
        .collect();

    // network: 0 = source, i+1 = graph node i, n+1 = sink
    let n = g.node_count();
    let nn = n + 2;
    let source = 0;
    let sink = nn - 1;
    let mu_v1 = mu.sum_over(&v1_sorted);
    let unbounded_bound = &mu_v1 + &Rat::one();
    let mut arcs = Vec::new();
    for &i in &v1_sorted {
        arcs.push(FlowArc {
            from: source,
            to: i + 1,
            capacity: Capacity::Finite(mu.get(i).clone()),
        });
    }
    for &j in &v2 {
        arcs.push(FlowArc {
            from: j + 1,
            to: sink,
            capacity: Capacity::Finite(delta[&j].clone()),
        });
    }
    for e in g.edges() {
        let (i, j) = if v1_sorted.contains(&e.u) {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        arcs.push(FlowArc {
            from: i + 1,
            to: j + 1,
            capacity: Capacity::Unbounded,
        });
    }
    let network = FlowNetwork {
        node_count: nn,
        source,
        sink,
        arcs,
    };

    let mut cap = vec![vec![Rat::zero(); nn]; nn];
    for arc in &network.arcs {
        cap[arc.from][arc.to] = match &arc.capacity {
            Capacity::Finite(c) => c.clone(),
            Capacity::Unbounded => unbounded_bound.clone(),
        };
    }
    let original = cap.clone();
    let flow_value = max_flow(nn, &mut cap, source, sink);

    if flow_value == mu_v1 {
        let weights: Vec<Rat> = g
            .edges()
            .iter()
            .map(|e| {
                let (i, j) = if v1_sorted.contains(&e.u) {
                    (e.u, e.v)
                } else {
                    (e.v, e.u)
                };
                // flow on i -> j is the capacity consumed
                &original[i + 1][j + 1] - &cap[i + 1][j + 1]
            })
            .collect();
        let weights = EdgeWeights::nonnegative(g, weights)?;
        Ok(MaxflowOutcome::Member {
            weights,
            delta,
            flow_value,
        })
    } else {
        // source side of the minimum cut = residual-reachable set
        let mut reach = vec![false; nn];
        reach[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..nn {
                if !reach[v] && cap[u][v].is_positive() {
                    reach[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let source_side: Vec<usize> = (0..n).filter(|&i| reach[i + 1]).collect();
        let violating_set: Vec<usize> = {
            let mut out = Vec::new();
            let mut rest = worst_mask;
            while rest != 0 {
                out.push(rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
            out
        };
        let eu = g.neighborhood(&violating_set)?;
        Ok(MaxflowOutcome::NotMember {
            cut: CutCertificate {
                source_side,
                capacity: flow_value,
                mu_u: mu.sum_over(&violating_set),
                mu_eu: mu.sum_over(&eu),
                violating_set,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::weighted_values;

    fn graph(edges: &[(&str, &str)]) -> Multigraph {
        Multigraph::from_named_edges(edges).unwrap()
    }

    #[test]
    fn single_edge_flow() {
        let g = graph(&[("1", "2")]);
        let mu = NodeMeasure::new(vec![Rat::one(), Rat::from_int(2)]).unwrap();
        let v1 = vec![g.node_index("1").unwrap()];
        match maxflow_decompose(&g, &v1, &mu).unwrap() {
            MaxflowOutcome::Member {
                weights,
                delta,
                flow_value,
            } => {
                assert_eq!(weights.values(), &[Rat::one()]);
                assert_eq!(flow_value, Rat::one());
                let d = &delta[&g.node_index("2").unwrap()];
                assert!(*d < Rat::from_int(2) && *d > Rat::one());
            }
            other => panic!("expected member, got {other:?}"),
        }
    }

    #[test]
    fn star_flow_and_cut() {
        let star = graph(&[("c", "a"), ("c", "b"), ("c", "d")]);
        let c = star.node_index("c").unwrap();
        let leaves: Vec<usize> = ["a", "b", "d"]
            .iter()
            .map(|s| star.node_index(s).unwrap())
            .collect();
        let mut vals = vec![Rat::new(1, 4); 4];
        vals[c] = Rat::one();
        let mu = NodeMeasure::new(vals).unwrap();
        match maxflow_decompose(&star, &leaves, &mu).unwrap() {
            MaxflowOutcome::Member {
                weights,
                flow_value,
                delta,
            } => {
                assert_eq!(flow_value, Rat::new(3, 4));
                assert!(weights.values().iter().all(|w| *w == Rat::new(1, 4)));
                // mu^alpha(i) = mu(i) on the customer side, < mu on pools
                let back = weighted_values(&star, &weights).unwrap();
                for &l in &leaves {
                    assert_eq!(back[l], Rat::new(1, 4));
                }
                assert!(back[c] <= delta[&c] && delta[&c] < Rat::one());
            }
            other => panic!("expected member, got {other:?}"),
        }

        // center mass 1/2 < 3/4: all leaves together starve
        let mut vals = vec![Rat::new(1, 4); 4];
        vals[c] = Rat::new(1, 2);
        let mu = NodeMeasure::new(vals).unwrap();
        match maxflow_decompose(&star, &leaves, &mu).unwrap() {
            MaxflowOutcome::NotMember { cut } => {
                assert!(cut.capacity < Rat::new(3, 4));
                assert!(cut.mu_u >= cut.mu_eu);
                let mut set = cut.violating_set.clone();
                set.sort_unstable();
                assert_eq!(set, leaves);
            }
            other => panic!("expected cut, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_bipartite_and_bad_side() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        let mu = NodeMeasure::new(vec![Rat::one(); 3]).unwrap();
        assert!(maxflow_decompose(&tri, &[0], &mu).is_err());

        let path = graph(&[("1", "2"), ("2", "3")]);
        let mu = NodeMeasure::new(vec![Rat::one(); 3]).unwrap();
        // {node 1} is not a bipartition side of the path
        let bad = vec![path.node_index("1").unwrap()];
        assert!(maxflow_decompose(&path, &bad, &mu).is_err());
    }
}
