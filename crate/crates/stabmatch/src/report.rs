//! JSON rendering of results, shared by the CLI and the C ABI. Rationals
//! are serialized as exact `p/q` strings; simulation estimates as doubles.
//! Maps are ordered, so identical inputs produce byte-identical JSON.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::closed_form::SolutionFamily;
use crate::decompose::{AsymOutcome, DecomposeOutcome, FarkasCertificate};
use crate::flow::MaxflowOutcome;
use crate::graph::Multigraph;
use crate::measure::{EdgeWeights, NodeMeasure};
use crate::rat::Rat;
use crate::sim::{balance_residual, RateEstimate};
use crate::sim_bipartite::{bipartite_balance_residual, BipartiteRateEstimate, PairArrivalLaw};

pub fn rat_str(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn edge_key(g: &Multigraph, u: usize, v: usize) -> String {
    format!("{}-{}", g.name(u), g.name(v))
}

pub fn weights_json(g: &Multigraph, w: &EdgeWeights) -> Value {
    let map: BTreeMap<String, Value> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| (edge_key(g, edge.u, edge.v), rat_str(w.get(e))))
        .collect();
    json!(map)
}

pub fn certificate_json(g: &Multigraph, c: &FarkasCertificate) -> Value {
    let y: BTreeMap<String, Value> = (0..g.node_count())
        .map(|i| (g.name(i).to_string(), rat_str(&c.y[i])))
        .collect();
    json!({
        "y": y,
        "violating_set": c.violating_set.iter().map(|&i| g.name(i)).collect::<Vec<_>>(),
        "slack": rat_str(&c.slack),
    })
}

fn named_rat_map<'a>(
    g: &Multigraph,
    items: impl IntoIterator<Item = (&'a usize, &'a Rat)>,
) -> Value {
    let map: BTreeMap<String, Value> = items
        .into_iter()
        .map(|(&i, v)| (g.name(i).to_string(), rat_str(v)))
        .collect();
    json!(map)
}

pub fn decompose_json(g: &Multigraph, out: &DecomposeOutcome) -> Value {
    match out {
        DecomposeOutcome::Member { weights, epsilon } => json!({
            "member": true,
            "boundary": false,
            "epsilon": rat_str(epsilon),
            "weights": weights_json(g, weights),
            "certificate": Value::Null,
        }),
        DecomposeOutcome::Boundary { weights } => json!({
            "member": false,
            "boundary": true,
            "epsilon": "0",
            "weights": weights_json(g, weights),
            "certificate": Value::Null,
        }),
        DecomposeOutcome::NotMember { certificate } => json!({
            "member": false,
            "boundary": false,
            "epsilon": Value::Null,
            "weights": Value::Null,
            "certificate": certificate_json(g, certificate),
        }),
    }
}

pub fn asym_json(g: &Multigraph, out: &AsymOutcome) -> Value {
    match out {
        AsymOutcome::Member {
            weights,
            slack,
            epsilon,
        } => json!({
            "member": true,
            "boundary": false,
            "epsilon": rat_str(epsilon),
            "weights": weights_json(g, weights),
            "slack": named_rat_map(g, slack.iter()),
            "certificate": Value::Null,
        }),
        AsymOutcome::Boundary { weights, slack } => json!({
            "member": false,
            "boundary": true,
            "weights": weights_json(g, weights),
            "slack": named_rat_map(g, slack.iter()),
            "certificate": Value::Null,
        }),
        AsymOutcome::NotMember { certificate } => json!({
            "member": false,
            "boundary": false,
            "weights": Value::Null,
            "slack": Value::Null,
            "certificate": certificate_json(g, certificate),
        }),
    }
}

pub fn maxflow_json(g: &Multigraph, out: &MaxflowOutcome) -> Value {
    match out {
        MaxflowOutcome::Member {
            weights,
            delta,
            flow_value,
        } => json!({
            "member": true,
            "weights": weights_json(g, weights),
            "delta": named_rat_map(g, delta.iter()),
            "flow_value": rat_str(flow_value),
            "cut": Value::Null,
        }),
        MaxflowOutcome::NotMember { cut } => json!({
            "member": false,
            "weights": Value::Null,
            "cut": {
                "source_side": cut.source_side.iter().map(|&i| g.name(i)).collect::<Vec<_>>(),
                "capacity": rat_str(&cut.capacity),
                "violating_set": cut.violating_set.iter().map(|&i| g.name(i)).collect::<Vec<_>>(),
                "mu_U": rat_str(&cut.mu_u),
                "mu_EU": rat_str(&cut.mu_eu),
            },
        }),
    }
}

pub fn rates_json(g: &Multigraph, solution: &SolutionFamily) -> Value {
    match solution {
        SolutionFamily::Unique { weights, positive } => json!({
            "kind": "unique",
            "weights": weights_json(g, weights),
            "positive": positive,
            "family": Value::Null,
            "witness": Value::Null,
        }),
        SolutionFamily::NoSolution { reason, lhs, rhs } => json!({
            "kind": "none",
            "weights": Value::Null,
            "family": Value::Null,
            "witness": { "reason": reason, "lhs": rat_str(lhs), "rhs": rat_str(rhs) },
        }),
        SolutionFamily::Family {
            base,
            direction,
            t_lo,
            t_hi,
            positive_base,
        } => {
            let dir: BTreeMap<String, Value> = g
                .edges()
                .iter()
                .enumerate()
                .map(|(e, edge)| (edge_key(g, edge.u, edge.v), rat_str(&direction[e])))
                .collect();
            json!({
                "kind": "family",
                "weights": Value::Null,
                "family": {
                    "base": weights_json(g, base),
                    "direction": dir,
                    "t_lo": rat_str(t_lo),
                    "t_hi": rat_str(t_hi),
                    "positive_base": positive_base,
                },
                "witness": Value::Null,
            })
        }
    }
}

pub fn simulate_json(
    g: &Multigraph,
    est: &RateEstimate,
    mu: &NodeMeasure,
    slope: f64,
) -> Value {
    let theta: BTreeMap<String, f64> = g
        .edges()
        .iter()
        .map(|e| (edge_key(g, e.u, e.v), est.theta(e.u, e.v)))
        .collect();
    let residuals: BTreeMap<String, f64> = balance_residual(g, est, mu)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (g.name(i).to_string(), r))
        .collect();
    json!({
        "theta": theta,
        "residuals": residuals,
        "max_buffer": est.max_buffer,
        "mean_buffer": est.mean_buffer,
        "slope": slope,
        "steps": est.n,
        "seed": est.seed,
        "policy": est.policy.as_str(),
    })
}

pub fn simulate_bipartite_json(
    g: &Multigraph,
    est: &BipartiteRateEstimate,
    law: &PairArrivalLaw,
    slope: f64,
) -> Value {
    let theta: BTreeMap<String, f64> = g
        .edges()
        .iter()
        .map(|e| (edge_key(g, e.u, e.v), est.theta(e.u, e.v)))
        .collect();
    let residuals: BTreeMap<String, f64> = bipartite_balance_residual(g, est, law)
        .into_iter()
        .map(|(i, r)| (g.name(i).to_string(), r))
        .collect();
    json!({
        "theta": theta,
        "residuals": residuals,
        "max_buffer_side1": est.max_buffer_side1,
        "max_buffer_side2": est.max_buffer_side2,
        "mean_buffer": est.mean_buffer,
        "slope": slope,
        "steps": est.n,
        "seed": est.seed,
        "policy": est.policy.as_str(),
    })
}
