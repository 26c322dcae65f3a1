//! Exact solutions of the rate-balance system
//! `mu(i) = sum_{j ~ i} alpha(i,j)` on the topologies where it is solvable
//! in closed form: rooted trees, trees, cycles, and a tree plus one extra
//! edge (cycle-forming or self-loop). On these families the matching rates
//! are policy-invariant, which the report at the bottom checks against the
//! simulators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, RootedTree, TopologyTag};
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;
use crate::sim::{
    simulate_general, weights_from_rates, MatchingPolicy,
};
use crate::sim_bipartite::{simulate_bipartite, weights_from_bipartite_rates, PairArrivalLaw};
use crate::stability::tilde_marginals;

/// Solvability of the balance system on a given topology. `Unique` weights
/// may contain nonpositive entries; they still solve the system exactly and
/// are flagged rather than erased (positivity is the separate membership
/// question).
#[derive(Debug, Clone)]
pub enum SolutionFamily {
    Unique {
        weights: EdgeWeights,
        positive: bool,
    },
    NoSolution {
        reason: String,
        /// The two alternating masses whose equality fails.
        lhs: Rat,
        rhs: Rat,
    },
    /// `alpha(t) = base + t * direction`, solving the system for every `t`;
    /// the open interval `(t_lo, t_hi)` keeps all weights positive (it may
    /// be empty).
    Family {
        base: EdgeWeights,
        direction: Vec<Rat>,
        t_lo: Rat,
        t_hi: Rat,
        positive_base: bool,
    },
}

impl SolutionFamily {
    pub fn kind(&self) -> &'static str {
        match self {
            SolutionFamily::Unique { .. } => "unique",
            SolutionFamily::NoSolution { .. } => "none",
            SolutionFamily::Family { .. } => "family",
        }
    }
}

fn check_measure(g: &Multigraph, mu: &NodeMeasure) -> Result<()> {
    if mu.len() != g.node_count() {
        return Err(Error::input("measure does not match the graph"));
    }
    Ok(())
}

/// Leaf-up recursion on a rooted tree: `alpha(v, f(v)) = mu(v) - sum of
/// alpha over the edges to the sons of v`, solving the balance equations at
/// every node except the root. Returns the per-node up-weight.
fn rooted_up_weights(tree: &RootedTree, mu: &NodeMeasure) -> Vec<Rat> {
    let mut up = vec![Rat::zero(); mu.len()];
    for &v in tree.order.iter().rev() {
        let sons: Rat = tree.children[v].iter().map(|&c| &up[c]).sum();
        up[v] = mu.get(v) - &sons;
    }
    up
}

/// Solves the non-root equations of a tree. Weights may be nonpositive;
/// they are reported as-is.
pub fn solve_rooted_tree(g: &Multigraph, root: usize, mu: &NodeMeasure) -> Result<EdgeWeights> {
    check_measure(g, mu)?;
    if g.classify_topology().tag != TopologyTag::Tree {
        return Err(Error::input("not a tree"));
    }
    let tree = g.rooted_tree(root)?;
    let up = rooted_up_weights(&tree, mu);
    let mut values = vec![Rat::zero(); g.edge_count()];
    for &v in &tree.order {
        if let Some(p) = tree.parent[v] {
            let e = g.edge_index(v, p).expect("tree edge");
            values[e] = up[v].clone();
        }
    }
    EdgeWeights::raw(g, values)
}

/// Full tree system: unique solution exactly when the two bipartition
/// classes carry equal mass, no solution otherwise.
pub fn solve_tree(g: &Multigraph, mu: &NodeMeasure) -> Result<SolutionFamily> {
    check_measure(g, mu)?;
    if g.classify_topology().tag != TopologyTag::Tree {
        return Err(Error::input("not a tree"));
    }
    let tree = g.rooted_tree(0)?;
    let even: Rat = tree
        .order
        .iter()
        .filter(|&&v| tree.depth[v] % 2 == 0)
        .map(|&v| mu.get(v))
        .sum();
    let odd: Rat = tree
        .order
        .iter()
        .filter(|&&v| tree.depth[v] % 2 == 1)
        .map(|&v| mu.get(v))
        .sum();
    if even != odd {
        return Ok(SolutionFamily::NoSolution {
            reason: "bipartite balance fails".to_string(),
            lhs: even,
            rhs: odd,
        });
    }
    let weights = solve_rooted_tree(g, 0, mu)?;
    let positive = weights.values().iter().all(Rat::is_positive);
    Ok(SolutionFamily::Unique { weights, positive })
}

/// Result of the cycle linear system along a node sequence: weight `k` sits
/// on the edge `(c_k, c_{k+1})`.
enum CycleSolution {
    Unique(Vec<Rat>),
    /// particular solution at `t = 0`; direction alternates `+1, -1, ...`
    Family(Vec<Rat>),
    Inconsistent { even_mass: Rat, odd_mass: Rat },
}

/// Back-substitution on the bidiagonal-plus-corner system: each alpha_k is
/// affine in alpha_0, and the wrap-around equation fixes it (odd length) or
/// degenerates into the alternating-balance condition (even length).
fn cycle_system(masses: &[Rat]) -> CycleSolution {
    let n = masses.len();
    let mut p = vec![Rat::zero(); n];
    let mut q = vec![Rat::one(); n];
    for k in 1..n {
        p[k] = &masses[k] - &p[k - 1];
        q[k] = -&q[k - 1];
    }
    if n % 2 == 1 {
        let t = (&masses[0] - &p[n - 1]) / &Rat::from_int(2);
        let alpha = (0..n).map(|k| &p[k] + &(&q[k] * &t)).collect();
        CycleSolution::Unique(alpha)
    } else if p[n - 1] == masses[0] {
        CycleSolution::Family(p)
    } else {
        let even_mass = masses.iter().step_by(2).sum();
        let odd_mass = masses.iter().skip(1).step_by(2).sum();
        CycleSolution::Inconsistent {
            even_mass,
            odd_mass,
        }
    }
}

/// Assembles a cycle-system answer into edge-indexed weights; `extra`
/// carries already-fixed weights on the non-cycle edges.
fn assemble_cycle(
    g: &Multigraph,
    cycle: &[usize],
    solution: CycleSolution,
    extra: Vec<Rat>,
) -> Result<SolutionFamily> {
    let n = cycle.len();
    let edge_of = |k: usize| -> usize {
        g.edge_index(cycle[k], cycle[(k + 1) % n])
            .expect("cycle edge")
    };
    match solution {
        CycleSolution::Unique(alpha) => {
            let mut values = extra;
            for (k, a) in alpha.into_iter().enumerate() {
                values[edge_of(k)] = a;
            }
            let positive = values.iter().all(Rat::is_positive);
            Ok(SolutionFamily::Unique {
                weights: EdgeWeights::raw(g, values)?,
                positive,
            })
        }
        CycleSolution::Family(particular) => {
            // feasible t: alpha_k + (-1)^k t > 0 for the cycle entries and
            // the fixed extra weights must already be positive
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for (k, a) in particular.iter().enumerate() {
                if k % 2 == 0 {
                    let bound = -a;
                    if lo.as_ref().is_none_or(|l| bound > *l) {
                        lo = Some(bound);
                    }
                } else if hi.as_ref().is_none_or(|h| *a < *h) {
                    hi = Some(a.clone());
                }
            }
            let (lo, hi) = (lo.expect("even position"), hi.expect("odd position"));
            let shift = if lo < hi {
                (&lo + &hi) / &Rat::from_int(2)
            } else {
                Rat::zero()
            };
            let mut values = extra;
            let mut direction = vec![Rat::zero(); g.edge_count()];
            for (k, a) in particular.iter().enumerate() {
                let d = if k % 2 == 0 { Rat::one() } else { Rat::from_int(-1) };
                values[edge_of(k)] = a + &(&d * &shift);
                direction[edge_of(k)] = d;
            }
            let positive_base = values.iter().all(Rat::is_positive);
            Ok(SolutionFamily::Family {
                base: EdgeWeights::raw(g, values)?,
                direction,
                t_lo: &lo - &shift,
                t_hi: &hi - &shift,
                positive_base,
            })
        }
        CycleSolution::Inconsistent {
            even_mass,
            odd_mass,
        } => Ok(SolutionFamily::NoSolution {
            reason: "bipartite balance fails".to_string(),
            lhs: even_mass,
            rhs: odd_mass,
        }),
    }
}

/// Pure cycle: unique for odd length; for even length a one-parameter
/// family when the alternating masses agree, otherwise no solution.
pub fn solve_cycle(g: &Multigraph, mu: &NodeMeasure) -> Result<SolutionFamily> {
    check_measure(g, mu)?;
    let topo = g.classify_topology();
    if !matches!(topo.tag, TopologyTag::OddCycle | TopologyTag::EvenCycle) {
        return Err(Error::input("not a cycle"));
    }
    let masses: Vec<Rat> = topo.cycle.iter().map(|&v| mu.get(v).clone()).collect();
    assemble_cycle(
        g,
        &topo.cycle,
        cycle_system(&masses),
        vec![Rat::zero(); g.edge_count()],
    )
}

/// Tree plus one extra edge: the appended rooted trees are forced by the
/// leaf-up recursion; the cycle then sees the reduced measure
/// `mu-breve(r) = mu(r) - sum of the root's tree up-weights`; a self-loop
/// absorbs the root surplus directly.
pub fn solve_tree_plus_edge(g: &Multigraph, mu: &NodeMeasure) -> Result<SolutionFamily> {
    check_measure(g, mu)?;
    let topo = g.classify_topology();
    match topo.tag {
        TopologyTag::TreePlusSelfLoop => {
            let r = topo.cycle[0];
            let tree = &topo.attached[0];
            let up = rooted_up_weights(tree, mu);
            let mut values = vec![Rat::zero(); g.edge_count()];
            for &v in &tree.order {
                if let Some(p) = tree.parent[v] {
                    values[g.edge_index(v, p).expect("tree edge")] = up[v].clone();
                }
            }
            let sons: Rat = tree.children[r].iter().map(|&c| &up[c]).sum();
            values[g.edge_index(r, r).expect("self-loop")] = mu.get(r) - &sons;
            let positive = values.iter().all(Rat::is_positive);
            Ok(SolutionFamily::Unique {
                weights: EdgeWeights::raw(g, values)?,
                positive,
            })
        }
        TopologyTag::TreePlusOddCycleEdge | TopologyTag::TreePlusEvenCycleEdge => {
            let mut extra = vec![Rat::zero(); g.edge_count()];
            let mut reduced: Vec<Rat> = topo.cycle.iter().map(|&v| mu.get(v).clone()).collect();
            for tree in &topo.attached {
                let up = rooted_up_weights(tree, mu);
                for &v in &tree.order {
                    if let Some(p) = tree.parent[v] {
                        extra[g.edge_index(v, p).expect("tree edge")] = up[v].clone();
                    }
                }
                let sons: Rat = tree.children[tree.root].iter().map(|&c| &up[c]).sum();
                let pos = topo
                    .cycle
                    .iter()
                    .position(|&c| c == tree.root)
                    .expect("tree rooted on the cycle");
                reduced[pos] = mu.get(tree.root) - &sons;
            }
            assemble_cycle(g, &topo.cycle, cycle_system(&reduced), extra)
        }
        _ => Err(Error::input(
            "not a tree plus one extra edge (cycle edge or self-loop)",
        )),
    }
}

/// Dispatches on the topology; errors on uncovered classes.
pub fn solve_system(g: &Multigraph, mu: &NodeMeasure) -> Result<SolutionFamily> {
    let topo = g.classify_topology();
    match topo.tag {
        TopologyTag::Tree => solve_tree(g, mu),
        TopologyTag::OddCycle | TopologyTag::EvenCycle => solve_cycle(g, mu),
        TopologyTag::TreePlusOddCycleEdge
        | TopologyTag::TreePlusEvenCycleEdge
        | TopologyTag::TreePlusSelfLoop => solve_tree_plus_edge(g, mu),
        TopologyTag::Other => Err(Error::input(format!(
            "no closed form for topology class {:?}",
            topo.tag.as_str()
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct PolicyRun {
    pub policy: MatchingPolicy,
    pub alpha: BTreeMap<(usize, usize), f64>,
    /// Maximum absolute deviation from the closed-form weights.
    pub max_dev: f64,
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub topology: TopologyTag,
    pub closed_form: BTreeMap<(usize, usize), f64>,
    pub runs: Vec<PolicyRun>,
    /// Maximum pairwise deviation between policies, over edges.
    pub max_pairwise: f64,
}

/// Simulates all implemented policies on a policy-invariant topology and
/// compares the empirical weights to the closed-form solution. Trees run
/// the extended bipartite model on the conditional marginals; the
/// non-bipartite classes run the general model.
pub fn policy_invariance_report(
    g: &Multigraph,
    mu: &NodeMeasure,
    steps: u64,
    seed: u64,
) -> Result<InvarianceReport> {
    check_measure(g, mu)?;
    let topo = g.classify_topology();
    let tag = topo.tag;
    let (closed, runs): (EdgeWeights, Vec<PolicyRun>) = match tag {
        TopologyTag::OddCycle | TopologyTag::TreePlusOddCycleEdge | TopologyTag::TreePlusSelfLoop => {
            let normalized = mu.normalize();
            let closed = match solve_system(g, &normalized)? {
                SolutionFamily::Unique { weights, .. } => weights,
                other => {
                    return Err(Error::input(format!(
                        "expected a unique closed form, got {:?}",
                        other.kind()
                    )))
                }
            };
            let runs = [
                MatchingPolicy::Fcfm,
                MatchingPolicy::Ml,
                MatchingPolicy::UniformRandom,
            ]
            .into_iter()
            .map(|policy| {
                let est = simulate_general(g, &normalized, policy, steps, seed)?;
                Ok(PolicyRun {
                    policy,
                    alpha: weights_from_rates(g, &est),
                    max_dev: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
            (closed, runs)
        }
        TopologyTag::Tree => {
            let (m1, m2) = tilde_marginals(g, mu)?;
            let mut combined = vec![Rat::zero(); g.node_count()];
            for (&i, v) in m1.iter().chain(m2.iter()) {
                combined[i] = v.clone();
            }
            let combined = NodeMeasure::new(combined)?;
            let closed = match solve_tree(g, &combined)? {
                SolutionFamily::Unique { weights, .. } => weights,
                other => {
                    return Err(Error::input(format!(
                        "expected a unique closed form, got {:?}",
                        other.kind()
                    )))
                }
            };
            let law = PairArrivalLaw::product(g, m1, m2)?;
            let runs = [MatchingPolicy::Ml, MatchingPolicy::Fcfm]
                .into_iter()
                .map(|policy| {
                    let est = simulate_bipartite(g, &law, policy, steps, seed)?;
                    Ok(PolicyRun {
                        policy,
                        alpha: weights_from_bipartite_rates(g, &est),
                        max_dev: 0.0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (closed, runs)
        }
        other => {
            return Err(Error::input(format!(
                "policy invariance is not covered for topology class {:?}",
                other.as_str()
            )))
        }
    };

    let closed_map: BTreeMap<(usize, usize), f64> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| ((edge.u, edge.v), closed.get(e).to_f64()))
        .collect();
    let mut runs = runs;
    for run in &mut runs {
        run.max_dev = closed_map
            .iter()
            .map(|(k, c)| (run.alpha.get(k).copied().unwrap_or(0.0) - c).abs())
            .fold(0.0, f64::max);
    }
    let mut max_pairwise = 0.0f64;
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            for k in closed_map.keys() {
                let da = runs[a].alpha.get(k).copied().unwrap_or(0.0);
                let db = runs[b].alpha.get(k).copied().unwrap_or(0.0);
                max_pairwise = max_pairwise.max((da - db).abs());
            }
        }
    }
    Ok(InvarianceReport {
        topology: tag,
        closed_form: closed_map,
        runs,
        max_pairwise,
    })
}
