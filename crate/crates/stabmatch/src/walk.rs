//! Random walks on the edges of a multigraph and their correspondence with
//! weighted measures: weights give a reversible walk, and a reversible pair
//! `(P, mu)` gives back the weights `alpha(i,j) = mu(i) P(i,j)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;

/// A stochastic matrix supported on the edges of the graph: rows sum to one
/// exactly and `P(i,j) > 0` only when `(i,j)` is an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWalk {
    rows: Vec<BTreeMap<usize, Rat>>,
}

impl EdgeWalk {
    pub fn new(g: &Multigraph, rows: Vec<BTreeMap<usize, Rat>>) -> Result<EdgeWalk> {
        let n = g.node_count();
        if rows.len() != n {
            return Err(Error::input("one transition row per node required"));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut total = Rat::zero();
            for (&j, p) in row {
                if p.is_negative() {
                    return Err(Error::input(format!(
                        "negative transition probability at ({}, {})",
                        g.name(i),
                        g.name(j)
                    )));
                }
                if p.is_positive() && g.edge_index(i, j).is_none() {
                    return Err(Error::input(format!(
                        "transition ({}, {}) is not supported on an edge",
                        g.name(i),
                        g.name(j)
                    )));
                }
                total += p;
            }
            if total != Rat::one() {
                return Err(Error::input(format!(
                    "row {} sums to {}, expected 1",
                    g.name(i),
                    total
                )));
            }
        }
        let walk = EdgeWalk { rows };
        if !walk.is_irreducible(n) {
            return Err(Error::input("walk is not irreducible"));
        }
        Ok(walk)
    }

    fn is_irreducible(&self, n: usize) -> bool {
        let reach = |forward: bool| -> usize {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0usize];
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    let p = if forward { self.prob(u, v) } else { self.prob(v, u) };
                    if p.is_positive() && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.iter().filter(|&&b| b).count()
        };
        reach(true) == n && reach(false) == n
    }

    pub fn prob(&self, i: usize, j: usize) -> Rat {
        self.rows[i].get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn rows(&self) -> &[BTreeMap<usize, Rat>] {
        &self.rows
    }

    /// JSON map `{"i": {"j": "p/q"}}` with original node names.
    pub fn to_json(&self, g: &Multigraph) -> serde_json::Value {
        let mut outer = serde_json::Map::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut inner = serde_json::Map::new();
            for (&j, p) in row {
                if p.is_positive() {
                    inner.insert(g.name(j).to_string(), p.to_string().into());
                }
            }
            outer.insert(g.name(i).to_string(), serde_json::Value::Object(inner));
        }
        serde_json::Value::Object(outer)
    }

    pub fn parse_json(text: &str, g: &Multigraph) -> Result<EdgeWalk> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::input(format!("bad walk JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::input("walk JSON must be an object"))?;
        let mut rows = vec![BTreeMap::new(); g.node_count()];
        for (iname, row) in obj {
            let i = g.node_index(iname)?;
            let row = row
                .as_object()
                .ok_or_else(|| Error::input("walk rows must be objects"))?;
            for (jname, p) in row {
                let j = g.node_index(jname)?;
                let p = p
                    .as_str()
                    .ok_or_else(|| Error::input("probabilities must be rational strings"))?;
                rows[i].insert(j, Rat::parse(p).map_err(Error::Input)?);
            }
        }
        EdgeWalk::new(g, rows)
    }
}

/// The weighted random walk `P(i,j) = alpha(i,j) / sum_l alpha(i,l)`.
pub fn walk_from_weights(g: &Multigraph, w: &EdgeWeights) -> Result<EdgeWalk> {
    if w.len() != g.edge_count() {
        return Err(Error::input("weights do not match the graph"));
    }
    if !w.values().iter().all(Rat::is_positive) {
        return Err(Error::input("the weighted walk needs strictly positive weights"));
    }
    let rows = (0..g.node_count())
        .map(|i| {
            let mass: Rat = g.adjacency(i).iter().map(|&(_, e)| w.get(e)).sum();
            g.adjacency(i)
                .iter()
                .map(|&(j, e)| (j, w.get(e) / &mass))
                .collect()
        })
        .collect();
    EdgeWalk::new(g, rows)
}

/// Recovers weights from a reversible pair: requires exact detailed balance
/// `mu(i) P(i,j) = mu(j) P(j,i)` on every edge, and then
/// `alpha(i,j) = mu(i) P(i,j)` satisfies `mu^alpha = mu`.
pub fn weights_from_reversible(
    g: &Multigraph,
    p: &EdgeWalk,
    mu: &NodeMeasure,
) -> Result<EdgeWeights> {
    if mu.len() != g.node_count() {
        return Err(Error::input("measure does not match the graph"));
    }
    if let Some(e) = first_unbalanced_edge(g, p, mu) {
        return Err(Error::Reversibility {
            edge: g.edge_name(&g.edges()[e]),
            detail: format!(
                "mu(i)P(i,j) = {} but mu(j)P(j,i) = {}",
                mu.get(g.edges()[e].u) * &p.prob(g.edges()[e].u, g.edges()[e].v),
                mu.get(g.edges()[e].v) * &p.prob(g.edges()[e].v, g.edges()[e].u),
            ),
        });
    }
    let values: Vec<Rat> = g
        .edges()
        .iter()
        .map(|e| mu.get(e.u) * &p.prob(e.u, e.v))
        .collect();
    if values.iter().all(Rat::is_positive) {
        EdgeWeights::strict(g, values)
    } else {
        EdgeWeights::nonnegative(g, values)
    }
}

fn first_unbalanced_edge(g: &Multigraph, p: &EdgeWalk, mu: &NodeMeasure) -> Option<usize> {
    g.edges().iter().enumerate().find_map(|(idx, e)| {
        if e.is_loop() {
            return None; // trivially balanced
        }
        let lhs = mu.get(e.u) * &p.prob(e.u, e.v);
        let rhs = mu.get(e.v) * &p.prob(e.v, e.u);
        (lhs != rhs).then_some(idx)
    })
}

#[derive(Debug, Clone)]
pub struct BalanceReport {
    pub balanced: bool,
    /// First edge violating detailed balance, in canonical edge order.
    pub offending_edge: Option<(usize, usize)>,
    /// Whether `mu P = mu` holds exactly (a consequence of balance).
    pub stationary: bool,
}

/// Exact detailed-balance test, plus the stationarity consequence.
pub fn check_detailed_balance(g: &Multigraph, p: &EdgeWalk, mu: &NodeMeasure) -> BalanceReport {
    let offending = first_unbalanced_edge(g, p, mu).map(|e| (g.edges()[e].u, g.edges()[e].v));
    let stationary = (0..g.node_count()).all(|j| {
        let mass: Rat = (0..g.node_count())
            .map(|i| mu.get(i) * &p.prob(i, j))
            .sum();
        mass == *mu.get(j)
    });
    BalanceReport {
        balanced: offending.is_none(),
        offending_edge: offending,
        stationary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::weighted_measure;

    fn graph(edges: &[(&str, &str)]) -> Multigraph {
        Multigraph::from_named_edges(edges).unwrap()
    }

    #[test]
    fn triangle_walk() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        let w = EdgeWeights::strict(&tri, vec![Rat::new(1, 6); 3]).unwrap();
        let p = walk_from_weights(&tri, &w).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(p.prob(i, j), Rat::new(1, 2));
                }
            }
        }
        let mu = weighted_measure(&tri, &w).unwrap();
        let report = check_detailed_balance(&tri, &p, &mu);
        assert!(report.balanced && report.stationary);
        let back = weights_from_reversible(&tri, &p, &mu).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn path_walk_is_forced_on_leaves() {
        let path = graph(&[("1", "2"), ("2", "3")]);
        let w = EdgeWeights::strict(&path, vec![Rat::new(1, 4), Rat::new(1, 4)]).unwrap();
        let p = walk_from_weights(&path, &w).unwrap();
        let (n1, n2, n3) = (
            path.node_index("1").unwrap(),
            path.node_index("2").unwrap(),
            path.node_index("3").unwrap(),
        );
        assert_eq!(p.prob(n1, n2), Rat::one());
        assert_eq!(p.prob(n3, n2), Rat::one());
        assert_eq!(p.prob(n2, n1), Rat::new(1, 2));

        // explicit reversible pair gives back alpha = (1/4, 1/4)
        let mu = NodeMeasure::new(vec![Rat::new(1, 4), Rat::new(1, 2), Rat::new(1, 4)]).unwrap();
        let back = weights_from_reversible(&path, &p, &mu).unwrap();
        assert_eq!(back.values(), &[Rat::new(1, 4), Rat::new(1, 4)]);
    }

    #[test]
    fn biased_walk_is_rejected() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        // a directed-bias walk: rows sum to one but balance fails
        let rows = vec![
            BTreeMap::from([(1, Rat::new(3, 4)), (2, Rat::new(1, 4))]),
            BTreeMap::from([(2, Rat::new(3, 4)), (0, Rat::new(1, 4))]),
            BTreeMap::from([(0, Rat::new(3, 4)), (1, Rat::new(1, 4))]),
        ];
        let p = EdgeWalk::new(&tri, rows).unwrap();
        let mu = NodeMeasure::new(vec![Rat::new(1, 3); 3]).unwrap();
        let report = check_detailed_balance(&tri, &p, &mu);
        assert!(!report.balanced);
        assert!(report.offending_edge.is_some());
        assert!(matches!(
            weights_from_reversible(&tri, &p, &mu),
            Err(Error::Reversibility { .. })
        ));
    }

    #[test]
    fn self_loops_count_once() {
        let g = graph(&[("1", "2"), ("1", "1")]);
        let n1 = g.node_index("1").unwrap();
        let n2 = g.node_index("2").unwrap();
        let mut vals = vec![Rat::zero(); 2];
        vals[g.edge_index(n1, n2).unwrap()] = Rat::new(1, 4);
        vals[g.edge_index(n1, n1).unwrap()] = Rat::new(1, 2);
        let w = EdgeWeights::strict(&g, vals).unwrap();
        let p = walk_from_weights(&g, &w).unwrap();
        assert_eq!(p.prob(n1, n1), Rat::new(2, 3));
        assert_eq!(p.prob(n1, n2), Rat::new(1, 3));
        let mu = weighted_measure(&g, &w).unwrap();
        assert!(check_detailed_balance(&g, &p, &mu).balanced);
        assert_eq!(weights_from_reversible(&g, &p, &mu).unwrap(), w);
    }

    #[test]
    fn validation_catches_bad_walks() {
        let path = graph(&[("1", "2"), ("2", "3")]);
        // support off the edge set
        let rows = vec![
            BTreeMap::from([(2, Rat::one())]),
            BTreeMap::from([(0, Rat::one())]),
            BTreeMap::from([(1, Rat::one())]),
        ];
        assert!(EdgeWalk::new(&path, rows).is_err());
        // row not summing to one
        let rows = vec![
            BTreeMap::from([(1, Rat::new(1, 2))]),
            BTreeMap::from([(0, Rat::one())]),
            BTreeMap::from([(1, Rat::one())]),
        ];
        assert!(EdgeWalk::new(&path, rows).is_err());
    }

    #[test]
    fn json_round_trip() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        let w = EdgeWeights::strict(
            &tri,
            vec![Rat::new(1, 6), Rat::new(1, 3), Rat::new(1, 2)],
        )
        .unwrap();
        let p = walk_from_weights(&tri, &w).unwrap();
        let text = p.to_json(&tri).to_string();
        let q = EdgeWalk::parse_json(&text, &tri).unwrap();
        assert_eq!(p, q);
    }
}
