//! Constructive membership: find strictly positive edge weights whose
//! weighted measure equals `mu`, or a Farkas certificate plus a violating
//! independent set.
//!
//! The solver maximizes the minimum weight `eps` subject to the node balance
//! equations (substituting `alpha_e = beta_e + eps`, `beta_e >= 0`);
//! membership holds exactly when the optimum is positive. Feasible systems
//! with optimum zero sit on the region boundary and are reported as such,
//! with the degenerate weights kept for diagnostics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;
use crate::simplex::{solve, LpOutcome, StandardLp};

#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    /// Node vector with `y(i) + y(j) >= 0` on every non-loop edge and
    /// `y(i) >= 0` at every self-looped node.
    pub y: Vec<Rat>,
    /// Independent set with `mu(I) >= mu(E(I))`.
    pub violating_set: Vec<usize>,
    /// `sum_i mu(i) y(i) < 0`.
    pub slack: Rat,
}

#[derive(Debug, Clone)]
pub enum DecomposeOutcome {
    Member {
        weights: EdgeWeights,
        epsilon: Rat,
    },
    /// Feasible only with some zero weight: on the closed boundary, not in
    /// the (open) region.
    Boundary {
        weights: EdgeWeights,
    },
    NotMember {
        certificate: FarkasCertificate,
    },
}

impl DecomposeOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, DecomposeOutcome::Member { .. })
    }
}

/// Decides `mu in W(G)` constructively.
pub fn find_weights(g: &Multigraph, mu: &NodeMeasure) -> Result<DecomposeOutcome> {
    if mu.len() != g.node_count() {
        return Err(Error::input(format!(
            "measure has {} values but the graph has {} nodes",
            mu.len(),
            g.node_count()
        )));
    }
    let n = g.node_count();
    let m = g.edge_count();
    let eps_col = m;
    let rows = (0..n)
        .map(|i| {
            let mut coeffs = vec![Rat::zero(); m + 1];
            for &(_, e) in g.adjacency(i) {
                coeffs[e] = Rat::one();
            }
            coeffs[eps_col] = Rat::from_int(g.degree(i) as i64);
            (coeffs, mu.get(i).clone())
        })
        .collect();
    let mut objective = vec![Rat::zero(); m + 1];
    objective[eps_col] = Rat::from_int(-1);
    let lp = StandardLp {
        ncols: m + 1,
        rows,
        objective,
    };

    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => {
            let epsilon = x[eps_col].clone();
            let alpha: Vec<Rat> = (0..m).map(|e| &x[e] + &epsilon).collect();
            if epsilon.is_positive() {
                Ok(DecomposeOutcome::Member {
                    weights: EdgeWeights::strict(g, alpha)?,
                    epsilon,
                })
            } else {
                Ok(DecomposeOutcome::Boundary {
                    weights: EdgeWeights::nonnegative(g, alpha)?,
                })
            }
        }
        LpOutcome::Infeasible { farkas } => {
            let y: Vec<Rat> = farkas.iter().map(|v| -v).collect();
            debug_assert!(validate_farkas_vector(g, mu, &y).is_ok());
            let (y, violating_set) = collapse_levels(g, mu, y);
            let slack = objective_value(mu, &y);
            Ok(DecomposeOutcome::NotMember {
                certificate: FarkasCertificate {
                    y,
                    violating_set,
                    slack,
                },
            })
        }
        LpOutcome::Unbounded => unreachable!("eps is bounded by the total mass"),
    }
}

fn objective_value(mu: &NodeMeasure, y: &[Rat]) -> Rat {
    mu.values().iter().zip(y).map(|(m, yi)| m * yi).sum()
}

/// Checks the raw Farkas conditions of a node vector.
pub fn validate_farkas_vector(g: &Multigraph, mu: &NodeMeasure, y: &[Rat]) -> Result<()> {
    for e in g.edges() {
        if e.is_loop() {
            if y[e.u].is_negative() {
                return Err(Error::input(format!(
                    "y({}) < 0 at a self-looped node",
                    g.name(e.u)
                )));
            }
        } else if (&y[e.u] + &y[e.v]).is_negative() {
            return Err(Error::input(format!(
                "y({}) + y({}) < 0",
                g.name(e.u),
                g.name(e.v)
            )));
        }
    }
    if !objective_value(mu, y).is_negative() {
        return Err(Error::input("sum mu(i) y(i) is not negative"));
    }
    Ok(())
}

/// Validates a full certificate: the `y` conditions plus the violating set
/// being independent with `mu(I) >= mu(E(I))`.
pub fn validate_certificate(
    g: &Multigraph,
    mu: &NodeMeasure,
    cert: &FarkasCertificate,
) -> Result<()> {
    validate_farkas_vector(g, mu, &cert.y)?;
    if cert.slack != objective_value(mu, &cert.y) {
        return Err(Error::input("certificate slack mismatch"));
    }
    let set = &cert.violating_set;
    if set.is_empty() {
        return Err(Error::input("empty violating set"));
    }
    for (k, &i) in set.iter().enumerate() {
        if g.has_loop_at(i) {
            return Err(Error::input("violating set contains a self-looped node"));
        }
        for &j in &set[k..] {
            if g.edge_index(i, j).is_some() {
                return Err(Error::input("violating set is not independent"));
            }
        }
    }
    let eu = g.neighborhood(set)?;
    if mu.sum_over(set) < mu.sum_over(&eu) {
        return Err(Error::input("violating set has mu(U) < mu(E(U))"));
    }
    Ok(())
}

/// The value-collapsing procedure: repeatedly merge the largest `|y|` level
/// into the second largest while the objective stays negative; stop as soon
/// as the level sets expose an independent set with `mu(I) >= mu(E(I))`.
fn collapse_levels(g: &Multigraph, mu: &NodeMeasure, mut y: Vec<Rat>) -> (Vec<Rat>, Vec<usize>) {
    let _ = g;
    loop {
        let p = y.iter().map(Rat::abs).max().expect("nonempty y");
        assert!(
            p.is_positive(),
            "zero Farkas vector cannot have negative objective"
        );
        let plus: Vec<usize> = (0..y.len()).filter(|&i| y[i] == p).collect();
        let minus: Vec<usize> = (0..y.len()).filter(|&i| y[i] == -&p).collect();
        let single_level = y.iter().all(|v| v.abs() == p);
        if single_level || mu.sum_over(&plus) <= mu.sum_over(&minus) {
            return (y, minus);
        }
        let q = y
            .iter()
            .map(Rat::abs)
            .filter(|a| *a < p)
            .max()
            .expect("second level exists");
        for &i in &plus {
            y[i] = q.clone();
        }
        for &i in &minus {
            y[i] = -&q;
        }
    }
}

#[derive(Debug, Clone)]
pub enum AsymOutcome {
    Member {
        /// Strict weights on the edges of `g` with `mu^alpha = mu` on `v1`.
        weights: EdgeWeights,
        /// Per-`v2`-node slack `mu(j) - mu^alpha(j) > 0` (the stripped
        /// self-loop weight).
        slack: BTreeMap<usize, Rat>,
        epsilon: Rat,
    },
    Boundary {
        weights: EdgeWeights,
        slack: BTreeMap<usize, Rat>,
    },
    NotMember {
        certificate: FarkasCertificate,
    },
}

impl AsymOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, AsymOutcome::Member { .. })
    }
}

/// Decides the asymmetric region by adding a self-loop at every node of
/// `v2 = V \ v1`, decomposing on that multigraph and stripping the loops.
pub fn decompose_asym(g: &Multigraph, v1: &[usize], mu: &NodeMeasure) -> Result<AsymOutcome> {
    if g.has_any_loop() {
        return Err(Error::input(
            "the asymmetric decomposition expects a graph without self-loops",
        ));
    }
    let n = g.node_count();
    let mut in_v1 = vec![false; n];
    for &i in v1 {
        if i >= n {
            return Err(Error::input(format!("node index {i} out of range")));
        }
        in_v1[i] = true;
    }
    let v2: Vec<usize> = (0..n).filter(|&i| !in_v1[i]).collect();
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::input(
            "the partition (V1, V2) must be nontrivial: both sides nonempty",
        ));
    }

    let mut pairs: Vec<(String, String)> = g
        .edges()
        .iter()
        .map(|e| (g.name(e.u).to_string(), g.name(e.v).to_string()))
        .collect();
    for &j in &v2 {
        pairs.push((g.name(j).to_string(), g.name(j).to_string()));
    }
    let hat = Multigraph::from_named_edges(&pairs)?;
    let to_hat: Vec<usize> = (0..n)
        .map(|i| hat.node_index(g.name(i)).expect("same node names"))
        .collect();
    let from_hat: BTreeMap<usize, usize> = to_hat.iter().enumerate().map(|(o, &h)| (h, o)).collect();
    let mut hat_values = vec![Rat::zero(); n];
    for i in 0..n {
        hat_values[to_hat[i]] = mu.get(i).clone();
    }
    let hat_mu = NodeMeasure::new(hat_values)?;

    let strip = |weights: &EdgeWeights| -> (Vec<Rat>, BTreeMap<usize, Rat>) {
        let alpha = g
            .edges()
            .iter()
            .map(|e| {
                let he = hat
                    .edge_index(to_hat[e.u], to_hat[e.v])
                    .expect("edge preserved");
                weights.get(he).clone()
            })
            .collect();
        let slack = v2
            .iter()
            .map(|&j| {
                let le = hat.edge_index(to_hat[j], to_hat[j]).expect("loop added");
                (j, weights.get(le).clone())
            })
            .collect();
        (alpha, slack)
    };

    match find_weights(&hat, &hat_mu)? {
        DecomposeOutcome::Member { weights, epsilon } => {
            let (alpha, slack) = strip(&weights);
            Ok(AsymOutcome::Member {
                weights: EdgeWeights::strict(g, alpha)?,
                slack,
                epsilon,
            })
        }
        DecomposeOutcome::Boundary { weights } => {
            let (alpha, slack) = strip(&weights);
            Ok(AsymOutcome::Boundary {
                weights: EdgeWeights::nonnegative(g, alpha)?,
                slack,
            })
        }
        DecomposeOutcome::NotMember { certificate } => {
            // translate node indices back; independence in the looped graph
            // forces the violating set inside v1, where it violates the
            // asymmetric condition directly
            let y = (0..n)
                .map(|i| certificate.y[to_hat[i]].clone())
                .collect();
            let violating_set: Vec<usize> = certificate
                .violating_set
                .iter()
                .map(|h| from_hat[h])
                .collect();
            Ok(AsymOutcome::NotMember {
                certificate: FarkasCertificate {
                    y,
                    violating_set,
                    slack: certificate.slack,
                },
            })
        }
    }
}

/// Service rates of the skill-based system: either one rate per server
/// pool, or one rate per compatible (class, pool) edge.
#[derive(Debug, Clone)]
pub enum ServiceRates {
    PerNode(BTreeMap<usize, Rat>),
    /// Indexed like `g.edges()`.
    PerEdge(Vec<Rat>),
}

#[derive(Debug, Clone)]
pub struct SkillCertificate {
    pub y: Vec<Rat>,
    pub slack: Rat,
    /// Present when the reduction through the looped graph produced a
    /// violating node set.
    pub violating_set: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub enum SkillOutcome {
    Member {
        weights: EdgeWeights,
        /// Per edge `(i,j)`: the server-time fraction
        /// `pi = alpha / (gamma * s_j)`, with `sum_i pi((i,j)) < 1`.
        pi: Vec<Rat>,
        epsilon: Rat,
    },
    Boundary {
        weights: EdgeWeights,
        pi: Vec<Rat>,
    },
    NotMember {
        certificate: SkillCertificate,
    },
}

impl SkillOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, SkillOutcome::Member { .. })
    }
}

/// Membership of per-class arrival rates in the maximal stability region of
/// the multi-class multi-pool system on a bipartite compatibility graph.
pub fn skillbased_membership(
    g: &Multigraph,
    v1: &[usize],
    mu_v1: &BTreeMap<usize, Rat>,
    rates: &ServiceRates,
    servers: &BTreeMap<usize, u64>,
) -> Result<SkillOutcome> {
    let bip = g
        .bipartition()
        .ok_or_else(|| Error::input("skill-based systems need a bipartite graph"))?;
    let mut v1_sorted = v1.to_vec();
    v1_sorted.sort_unstable();
    if v1_sorted != bip.part1 && v1_sorted != bip.part2 {
        return Err(Error::input(
            "v1 must be one side of the bipartition (the customer classes)",
        ));
    }
    let v2: Vec<usize> = (0..g.node_count())
        .filter(|i| !v1_sorted.contains(i))
        .collect();
    for &i in &v1_sorted {
        if !mu_v1.get(&i).is_some_and(Rat::is_positive) {
            return Err(Error::input(format!(
                "arrival rate for class {:?} missing or not positive",
                g.name(i)
            )));
        }
    }
    for &j in &v2 {
        if !servers.get(&j).is_some_and(|s| *s >= 1) {
            return Err(Error::input(format!(
                "server count for pool {:?} missing or zero",
                g.name(j)
            )));
        }
    }
    let gamma_of_edge = |e: usize| -> Result<Rat> {
        match rates {
            ServiceRates::PerEdge(v) => {
                if v.len() != g.edge_count() {
                    return Err(Error::input("per-edge rates must cover every edge"));
                }
                Ok(v[e].clone())
            }
            ServiceRates::PerNode(map) => {
                let edge = g.edges()[e];
                let j = if v2.contains(&edge.u) { edge.u } else { edge.v };
                map.get(&j)
                    .cloned()
                    .ok_or_else(|| Error::input(format!("service rate for pool {:?} missing", g.name(j))))
            }
        }
    };
    for e in 0..g.edge_count() {
        if !gamma_of_edge(e)?.is_positive() {
            return Err(Error::input("service rates must be positive"));
        }
    }

    if let ServiceRates::PerNode(map) = rates {
        // hat-gamma(j) = s_j * gamma(j), then the asymmetric decomposition
        // on the extended measure
        let mut values = vec![Rat::zero(); g.node_count()];
        for &i in &v1_sorted {
            values[i] = mu_v1[&i].clone();
        }
        for &j in &v2 {
            values[j] = &map[&j] * &Rat::from_int(servers[&j] as i64);
        }
        let mu_ext = NodeMeasure::new(values)?;
        let pi_of = |weights: &EdgeWeights| -> Result<Vec<Rat>> {
            (0..g.edge_count())
                .map(|e| {
                    let edge = g.edges()[e];
                    let j = if v2.contains(&edge.u) { edge.u } else { edge.v };
                    let denom = &gamma_of_edge(e)? * &Rat::from_int(servers[&j] as i64);
                    Ok(weights.get(e) / &denom)
                })
                .collect()
        };
        return Ok(match decompose_asym(g, &v1_sorted, &mu_ext)? {
            AsymOutcome::Member {
                weights, epsilon, ..
            } => {
                let pi = pi_of(&weights)?;
                SkillOutcome::Member {
                    weights,
                    pi,
                    epsilon,
                }
            }
            AsymOutcome::Boundary { weights, .. } => {
                let pi = pi_of(&weights)?;
                SkillOutcome::Boundary { weights, pi }
            }
            AsymOutcome::NotMember { certificate } => SkillOutcome::NotMember {
                certificate: SkillCertificate {
                    slack: certificate.slack.clone(),
                    violating_set: Some(certificate.violating_set.clone()),
                    y: certificate.y,
                },
            },
        });
    }

    // Per-edge rates: the pool constraints sum alpha/gamma < s_j enter the
    // program directly, sharing the same strictness variable eps.
    let n = g.node_count();
    let m = g.edge_count();
    let pool_col: BTreeMap<usize, usize> = v2.iter().enumerate().map(|(k, &j)| (j, m + k)).collect();
    let eps_col = m + v2.len();
    let ncols = eps_col + 1;
    let mut rows = Vec::with_capacity(n);
    for &i in &v1_sorted {
        let mut coeffs = vec![Rat::zero(); ncols];
        for &(_, e) in g.adjacency(i) {
            coeffs[e] = Rat::one();
        }
        coeffs[eps_col] = Rat::from_int(g.degree(i) as i64);
        rows.push((coeffs, mu_v1[&i].clone()));
    }
    for &j in &v2 {
        let mut coeffs = vec![Rat::zero(); ncols];
        let mut eps_coeff = Rat::one();
        for &(_, e) in g.adjacency(j) {
            let inv = gamma_of_edge(e)?.recip();
            eps_coeff += &inv;
            coeffs[e] = inv;
        }
        coeffs[pool_col[&j]] = Rat::one();
        coeffs[eps_col] = eps_coeff;
        rows.push((coeffs, Rat::from_int(servers[&j] as i64)));
    }
    let mut objective = vec![Rat::zero(); ncols];
    objective[eps_col] = Rat::from_int(-1);
    let lp = StandardLp {
        ncols,
        rows,
        objective,
    };
    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => {
            let epsilon = x[eps_col].clone();
            let alpha: Vec<Rat> = (0..m).map(|e| &x[e] + &epsilon).collect();
            let pi: Vec<Rat> = (0..m)
                .map(|e| {
                    let edge = g.edges()[e];
                    let j = if v2.contains(&edge.u) { edge.u } else { edge.v };
                    let denom = &gamma_of_edge(e)? * &Rat::from_int(servers[&j] as i64);
                    Ok(&alpha[e] / &denom)
                })
                .collect::<Result<_>>()?;
            if epsilon.is_positive() {
                Ok(SkillOutcome::Member {
                    weights: EdgeWeights::strict(g, alpha)?,
                    pi,
                    epsilon,
                })
            } else {
                Ok(SkillOutcome::Boundary {
                    weights: EdgeWeights::nonnegative(g, alpha)?,
                    pi,
                })
            }
        }
        LpOutcome::Infeasible { farkas } => {
            let mut y = vec![Rat::zero(); n];
            for (k, &i) in v1_sorted.iter().enumerate() {
                y[i] = -&farkas[k];
            }
            for (k, &j) in v2.iter().enumerate() {
                y[j] = -&farkas[v1_sorted.len() + k];
            }
            let slack = v1_sorted
                .iter()
                .map(|&i| &mu_v1[&i] * &y[i])
                .sum::<Rat>()
                + v2
                    .iter()
                    .map(|&j| &Rat::from_int(servers[&j] as i64) * &y[j])
                    .sum::<Rat>();
            Ok(SkillOutcome::NotMember {
                certificate: SkillCertificate {
                    y,
                    slack,
                    violating_set: None,
                },
            })
        }
        LpOutcome::Unbounded => unreachable!("eps is bounded by the pool capacities"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{check_ncond, weighted_measure};

    fn graph(edges: &[(&str, &str)]) -> Multigraph {
        Multigraph::from_named_edges(edges).unwrap()
    }

    fn measure(vals: &[(i64, i64)]) -> NodeMeasure {
        NodeMeasure::new(vals.iter().map(|&(n, d)| Rat::new(n, d)).collect()).unwrap()
    }

    #[test]
    fn triangle_decompositions() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        // edges sorted: (1,2), (1,3), (2,3)
        let mu = measure(&[(2, 5), (7, 20), (1, 4)]);
        match find_weights(&tri, &mu).unwrap() {
            DecomposeOutcome::Member { weights, epsilon } => {
                assert_eq!(
                    weights.values(),
                    &[Rat::new(1, 4), Rat::new(3, 20), Rat::new(1, 10)]
                );
                assert_eq!(epsilon, Rat::new(1, 10));
                let back = weighted_measure(&tri, &weights).unwrap();
                assert_eq!(back, mu);
            }
            other => panic!("expected member, got {other:?}"),
        }

        let uniform = measure(&[(1, 3), (1, 3), (1, 3)]);
        match find_weights(&tri, &uniform).unwrap() {
            DecomposeOutcome::Member { weights, .. } => {
                assert_eq!(weights.values(), vec![Rat::new(1, 6); 3]);
            }
            other => panic!("expected member, got {other:?}"),
        }
    }

    #[test]
    fn star_certificate() {
        let star = graph(&[("c", "a"), ("c", "b"), ("c", "d")]);
        let mut vals = vec![Rat::zero(); 4];
        vals[star.node_index("c").unwrap()] = Rat::new(2, 5);
        for leaf in ["a", "b", "d"] {
            vals[star.node_index(leaf).unwrap()] = Rat::new(1, 5);
        }
        let mu = NodeMeasure::new(vals).unwrap();
        match find_weights(&star, &mu).unwrap() {
            DecomposeOutcome::NotMember { certificate } => {
                validate_certificate(&star, &mu, &certificate).unwrap();
                assert!(certificate.slack.is_negative());
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        // the y of the worked example is itself a valid Farkas vector, with
        // the three leaves as the violating independent set
        let mut y = vec![Rat::zero(); 4];
        y[star.node_index("c").unwrap()] = Rat::one();
        for leaf in ["a", "b", "d"] {
            y[star.node_index(leaf).unwrap()] = Rat::from_int(-1);
        }
        validate_farkas_vector(&star, &mu, &y).unwrap();
        let leaves: Vec<usize> = ["a", "b", "d"]
            .iter()
            .map(|s| star.node_index(s).unwrap())
            .collect();
        let eu = star.neighborhood(&leaves).unwrap();
        assert!(mu.sum_over(&leaves) >= mu.sum_over(&eu));
    }

    #[test]
    fn boundary_is_reported() {
        // paw graph with the zero-slack measure: feasible, but only with
        // alpha_12 = alpha_13 = 0, so eps_opt = 0
        let paw = graph(&[("1", "2"), ("2", "3"), ("1", "3"), ("1", "4")]);
        let mu = measure(&[(1, 10), (2, 5), (2, 5), (1, 10)]);
        match find_weights(&paw, &mu).unwrap() {
            DecomposeOutcome::Boundary { weights } => {
                assert!(weights.values().iter().any(Rat::is_zero));
                let back = crate::stability::weighted_values(&paw, &weights).unwrap();
                assert_eq!(back, mu.values());
            }
            other => panic!("expected boundary, got {other:?}"),
        }
        assert!(!check_ncond(&paw, &mu).unwrap().member);

        // an infeasible measure on the same graph yields a certificate
        let mu = measure(&[(1, 20), (2, 5), (2, 5), (3, 20)]);
        match find_weights(&paw, &mu).unwrap() {
            DecomposeOutcome::NotMember { certificate } => {
                validate_certificate(&paw, &mu, &certificate).unwrap();
            }
            other => panic!("expected certificate, got {other:?}"),
        }

        // single edge with equal masses: alpha = mu(1) strictly positive
        let edge = graph(&[("1", "2")]);
        let mu = measure(&[(1, 2), (1, 2)]);
        assert!(find_weights(&edge, &mu).unwrap().is_member());
    }

    #[test]
    fn asym_examples() {
        let star = graph(&[("c", "a"), ("c", "b"), ("c", "d")]);
        let leaves: Vec<usize> = ["a", "b", "d"]
            .iter()
            .map(|s| star.node_index(s).unwrap())
            .collect();
        let c = star.node_index("c").unwrap();
        let mut vals = vec![Rat::new(1, 4); 4];
        vals[c] = Rat::one();
        let mu = NodeMeasure::new(vals).unwrap();
        match decompose_asym(&star, &leaves, &mu).unwrap() {
            AsymOutcome::Member { weights, slack, .. } => {
                assert!(weights.values().iter().all(|v| *v == Rat::new(1, 4)));
                assert_eq!(slack[&c], Rat::new(1, 4));
            }
            other => panic!("expected member, got {other:?}"),
        }

        let edge = graph(&[("1", "2")]);
        let mu = measure(&[(1, 1), (2, 1)]);
        let v1 = vec![edge.node_index("1").unwrap()];
        match decompose_asym(&edge, &v1, &mu).unwrap() {
            AsymOutcome::Member { weights, slack, .. } => {
                assert_eq!(weights.values(), &[Rat::one()]);
                assert_eq!(slack[&edge.node_index("2").unwrap()], Rat::one());
            }
            other => panic!("expected member, got {other:?}"),
        }

        let mut vals = vec![Rat::new(1, 4); 4];
        vals[c] = Rat::new(1, 2);
        let mu = NodeMeasure::new(vals).unwrap();
        match decompose_asym(&star, &leaves, &mu).unwrap() {
            AsymOutcome::NotMember { certificate } => {
                let mut set = certificate.violating_set.clone();
                set.sort_unstable();
                assert_eq!(set, leaves);
            }
            other => panic!("expected certificate, got {other:?}"),
        }

        // input validation
        assert!(decompose_asym(&star, &[], &mu).is_err());
        let all: Vec<usize> = (0..4).collect();
        assert!(decompose_asym(&star, &all, &mu).is_err());
        let looped = graph(&[("1", "2"), ("1", "1")]);
        let mu2 = measure(&[(1, 2), (1, 2)]);
        assert!(decompose_asym(&looped, &[0], &mu2).is_err());
    }

    #[test]
    fn huge_denominators_stay_exact() {
        // weights far outside the i64 fast path; the triangle solution is
        // unique, so the solver must return them bit-exactly
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        let q = "100000000000000000000000067";
        let alpha: Vec<Rat> = ["31", "57", "11"]
            .iter()
            .map(|p| Rat::parse(&format!("{p}/{q}")).unwrap())
            .collect();
        let w = EdgeWeights::strict(&tri, alpha).unwrap();
        let mu = weighted_measure(&tri, &w).unwrap();
        match find_weights(&tri, &mu).unwrap() {
            DecomposeOutcome::Member { weights, .. } => {
                assert_eq!(weights.values(), w.values());
            }
            other => panic!("expected member, got {other:?}"),
        }
    }

    #[test]
    fn member_weights_reproduce_measure_exactly() {
        // soundness on a multigraph with a self-loop
        let g = graph(&[("1", "2"), ("2", "3"), ("1", "3"), ("2", "2")]);
        let mu = measure(&[(3, 10), (1, 2), (1, 5)]);
        if let DecomposeOutcome::Member { weights, epsilon } = find_weights(&g, &mu).unwrap() {
            assert!(weights.min_value() >= &epsilon);
            assert_eq!(weighted_measure(&g, &weights).unwrap(), mu);
            assert!(check_ncond(&g, &mu).unwrap().member);
        } else {
            panic!("expected member");
        }
    }

    #[test]
    fn skill_examples() {
        // single edge, mu(1)=1, gamma=2, s=1: pi = 1/2 < 1
        let edge = graph(&[("1", "2")]);
        let one = edge.node_index("1").unwrap();
        let two = edge.node_index("2").unwrap();
        let mu1 = BTreeMap::from([(one, Rat::one())]);
        let rates = ServiceRates::PerNode(BTreeMap::from([(two, Rat::from_int(2))]));
        let servers = BTreeMap::from([(two, 1u64)]);
        match skillbased_membership(&edge, &[one], &mu1, &rates, &servers).unwrap() {
            SkillOutcome::Member { weights, pi, .. } => {
                assert_eq!(weights.values(), &[Rat::one()]);
                assert_eq!(pi, vec![Rat::new(1, 2)]);
            }
            other => panic!("expected member, got {other:?}"),
        }

        // mu(1)=2, gamma=1, s=2: pi = 1, boundary
        let mu1 = BTreeMap::from([(one, Rat::from_int(2))]);
        let rates = ServiceRates::PerNode(BTreeMap::from([(two, Rat::one())]));
        let servers = BTreeMap::from([(two, 2u64)]);
        match skillbased_membership(&edge, &[one], &mu1, &rates, &servers).unwrap() {
            SkillOutcome::Boundary { pi, .. } => assert_eq!(pi, vec![Rat::one()]),
            other => panic!("expected boundary, got {other:?}"),
        }

        // star with leaves as customer classes, central pool
        let star = graph(&[("c", "a"), ("c", "b"), ("c", "d")]);
        let c = star.node_index("c").unwrap();
        let leaves: Vec<usize> = ["a", "b", "d"]
            .iter()
            .map(|s| star.node_index(s).unwrap())
            .collect();
        let mu1: BTreeMap<usize, Rat> =
            leaves.iter().map(|&l| (l, Rat::new(1, 4))).collect();
        let rates = ServiceRates::PerNode(BTreeMap::from([(c, Rat::one())]));
        let servers = BTreeMap::from([(c, 1u64)]);
        match skillbased_membership(&star, &leaves, &mu1, &rates, &servers).unwrap() {
            SkillOutcome::Member { weights, pi, .. } => {
                assert!(weights.values().iter().all(|v| *v == Rat::new(1, 4)));
                let total: Rat = pi.iter().sum();
                assert_eq!(total, Rat::new(3, 4));
            }
            other => panic!("expected member, got {other:?}"),
        }

        // per-edge rates agree with the per-node reduction on equal rates
        let per_edge = ServiceRates::PerEdge(vec![Rat::one(); 3]);
        match skillbased_membership(&star, &leaves, &mu1, &per_edge, &servers).unwrap() {
            SkillOutcome::Member { pi, .. } => {
                assert_eq!(pi.iter().sum::<Rat>(), Rat::new(3, 4));
            }
            other => panic!("expected member, got {other:?}"),
        }

        // validation: zero gamma rejected
        let bad = ServiceRates::PerNode(BTreeMap::from([(c, Rat::zero())]));
        assert!(skillbased_membership(&star, &leaves, &mu1, &bad, &servers).is_err());
    }
}
