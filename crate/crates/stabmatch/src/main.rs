//! Command-line interface: region checks, decompositions, random-walk
//! conversions, closed-form rates, simulators and the small-graph
//! verification harness. All results are JSON on stdout; progress notes go
//! to stderr unless `--quiet`.
//!
//! Exit codes: 0 member/success, 1 usage error, 2 input error,
//! 3 not-member (or verification discrepancies).

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use stabmatch::closed_form;
use stabmatch::decompose;
use stabmatch::error::Error;
use stabmatch::flow;
use stabmatch::graph::Multigraph;
use stabmatch::measure::{EdgeWeights, NodeMeasure};
use stabmatch::rat::Rat;
use stabmatch::report;
use stabmatch::sim::{self, MatchingPolicy};
use stabmatch::sim_bipartite::{self, PairArrivalLaw};
use stabmatch::stability;
use stabmatch::verify;
use stabmatch::walk::{self, EdgeWalk};

#[derive(Parser)]
#[command(
    name = "stabmatch",
    version,
    about = "Stability regions of matching models on compatibility graphs"
)]
struct Cli {
    /// Suppress progress lines on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of a measure in a stability region.
    Check {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measure: String,
        /// Region: general (N(G)), bipartite (N_B(G)) or asym (N_V1(G)).
        #[arg(long, default_value = "general")]
        region: String,
        /// Comma-separated node names of V1 (asym region only).
        #[arg(long)]
        v1: Option<String>,
    },
    /// Construct stabilizing edge weights or an infeasibility certificate.
    Decompose {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measure: String,
        /// Mode: general, asym (looped graph) or maxflow (bipartite flow).
        #[arg(long, default_value = "general")]
        mode: String,
        #[arg(long)]
        v1: Option<String>,
    },
    /// Convert edge weights to the weighted random walk, or a reversible
    /// pair (walk, measure) back to weights.
    Walk {
        #[arg(long)]
        graph: String,
        /// Weights file (`u v value` lines): emits the weighted walk.
        #[arg(long)]
        weights: Option<String>,
        /// Walk JSON file: recovers the weights (requires --measure).
        #[arg(long)]
        walk: Option<String>,
        #[arg(long)]
        measure: Option<String>,
    },
    /// Closed-form matching rates on trees, cycles and tree-plus-one-edge.
    Rates {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measure: String,
        /// Solve only the non-root equations of the tree rooted here.
        #[arg(long)]
        root: Option<String>,
    },
    /// Simulate the general matching model and estimate matching rates.
    Simulate {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measure: String,
        /// fcfm, ml or random.
        #[arg(long)]
        policy: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replications: u64,
    },
    /// Simulate the extended bipartite matching model.
    SimulateBipartite {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        marginal1: String,
        #[arg(long)]
        marginal2: String,
        /// ml or fcfm.
        #[arg(long)]
        policy: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Enumerate small graphs and verify the cross-module equivalences.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_nodes: usize,
        /// Random measures per graph (per partition in the asym harness).
        #[arg(long, default_value_t = 5)]
        measures: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(Error::input(format!("cannot read {path}: {e}"))))
}

fn load_graph(path: &str) -> Result<Multigraph, Failure> {
    Ok(Multigraph::parse(&read(path)?)?)
}

fn load_measure(path: &str, g: &Multigraph) -> Result<NodeMeasure, Failure> {
    Ok(NodeMeasure::parse(&read(path)?, g)?)
}

fn parse_v1(g: &Multigraph, v1: &Option<String>) -> Result<Vec<usize>, Failure> {
    let list = v1
        .as_ref()
        .ok_or_else(|| Failure::Usage("--v1 is required for this region".into()))?;
    let mut out = Vec::new();
    for name in list.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        out.push(g.node_index(name)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("valid JSON"));
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check {
            graph,
            measure,
            region,
            v1,
        } => {
            let g = load_graph(&graph)?;
            let mu = load_measure(&measure, &g)?;
            let verdict = match region.as_str() {
                "general" => stability::check_ncond(&g, &mu)?,
                "bipartite" => stability::check_ncond_bipartite(&g, &mu)?,
                "asym" => {
                    let v1 = parse_v1(&g, &v1)?;
                    stability::check_ncond_asym(&g, &v1, &mu)?
                }
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown region {other:?} (expected general, bipartite or asym)"
                    )))
                }
            };
            emit(&verdict.to_json(&g));
            Ok(if verdict.member { 0 } else { 3 })
        }
        Command::Decompose {
            graph,
            measure,
            mode,
            v1,
        } => {
            let g = load_graph(&graph)?;
            let mu = load_measure(&measure, &g)?;
            match mode.as_str() {
                "general" => {
                    let out = decompose::find_weights(&g, &mu)?;
                    emit(&report::decompose_json(&g, &out));
                    Ok(if out.is_member() { 0 } else { 3 })
                }
                "asym" => {
                    let v1 = parse_v1(&g, &v1)?;
                    let out = decompose::decompose_asym(&g, &v1, &mu)?;
                    emit(&report::asym_json(&g, &out));
                    Ok(if out.is_member() { 0 } else { 3 })
                }
                "maxflow" => {
                    let v1 = parse_v1(&g, &v1)?;
                    let out = flow::maxflow_decompose(&g, &v1, &mu)?;
                    emit(&report::maxflow_json(&g, &out));
                    Ok(if out.is_member() { 0 } else { 3 })
                }
                other => Err(Failure::Usage(format!(
                    "unknown mode {other:?} (expected general, asym or maxflow)"
                ))),
            }
        }
        Command::Walk {
            graph,
            weights,
            walk: walk_path,
            measure,
        } => {
            let g = load_graph(&graph)?;
            match (weights, walk_path) {
                (Some(wpath), None) => {
                    let w = EdgeWeights::parse(&read(&wpath)?, &g)?;
                    let p = walk::walk_from_weights(&g, &w)?;
                    emit(&json!({ "walk": p.to_json(&g) }));
                    Ok(0)
                }
                (None, Some(ppath)) => {
                    let mpath = measure.ok_or_else(|| {
                        Failure::Usage("--walk requires --measure for the reversible pair".into())
                    })?;
                    let mu = load_measure(&mpath, &g)?;
                    let p = EdgeWalk::parse_json(&read(&ppath)?, &g)?;
                    let balance = walk::check_detailed_balance(&g, &p, &mu);
                    let w = walk::weights_from_reversible(&g, &p, &mu)?;
                    emit(&json!({
                        "weights": report::weights_json(&g, &w),
                        "balanced": balance.balanced,
                        "stationary": balance.stationary,
                    }));
                    Ok(0)
                }
                _ => Err(Failure::Usage(
                    "pass exactly one of --weights (to build the walk) or --walk (to recover weights)"
                        .into(),
                )),
            }
        }
        Command::Rates {
            graph,
            measure,
            root,
        } => {
            let g = load_graph(&graph)?;
            let mu = load_measure(&measure, &g)?;
            if let Some(root) = root {
                let r = g.node_index(&root)?;
                let w = closed_form::solve_rooted_tree(&g, r, &mu)?;
                let positive = w.values().iter().all(Rat::is_positive);
                emit(&json!({
                    "kind": "rooted",
                    "root": root,
                    "weights": report::weights_json(&g, &w),
                    "positive": positive,
                }));
                return Ok(0);
            }
            let solution = closed_form::solve_system(&g, &mu)?;
            emit(&report::rates_json(&g, &solution));
            Ok(0)
        }
        Command::Simulate {
            graph,
            measure,
            policy,
            steps,
            seed,
            replications,
        } => {
            let g = load_graph(&graph)?;
            let mu = load_measure(&measure, &g)?.normalize();
            let policy = MatchingPolicy::parse(&policy)?;
            let (est, slope) =
                sim::simulate_general_replicated(&g, &mu, policy, steps, seed, replications)?;
            emit(&report::simulate_json(&g, &est, &mu, slope));
            Ok(0)
        }
        Command::SimulateBipartite {
            graph,
            marginal1,
            marginal2,
            policy,
            steps,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let m1 = parse_side_measure(&read(&marginal1)?, &g)?;
            let m2 = parse_side_measure(&read(&marginal2)?, &g)?;
            let policy = MatchingPolicy::parse(&policy)?;
            let law = PairArrivalLaw::product(&g, m1, m2)?;
            let (est, slope) =
                sim_bipartite::simulate_bipartite_replicated(&g, &law, policy, steps, seed, 1)?;
            emit(&report::simulate_bipartite_json(&g, &est, &law, slope));
            Ok(0)
        }
        Command::Verify {
            max_nodes,
            measures,
            seed,
        } => {
            let progress = |msg: &str| {
                if !cli.quiet {
                    eprintln!("{msg}");
                }
            };
            progress(&format!(
                "verifying general equivalences on multigraphs up to {max_nodes} nodes"
            ));
            let general = verify::verify_general(max_nodes, measures, seed)?;
            progress(&format!(
                "  {} graphs, {} instances, {} discrepancies",
                general.graphs,
                general.instances,
                general.discrepancies.len()
            ));
            progress("verifying bipartite equivalences");
            let bipartite = verify::verify_bipartite(max_nodes, measures, seed)?;
            progress(&format!(
                "  {} graphs, {} instances, {} discrepancies",
                bipartite.graphs,
                bipartite.instances,
                bipartite.discrepancies.len()
            ));
            progress("verifying asymmetric equivalences over all partitions");
            let asym = verify::verify_asym(max_nodes, measures, seed)?;
            progress(&format!(
                "  {} graphs, {} instances, {} discrepancies",
                asym.graphs,
                asym.instances,
                asym.discrepancies.len()
            ));
            let ok = general.ok() && bipartite.ok() && asym.ok();
            let render = |r: &verify::VerifyReport| {
                json!({
                    "graphs": r.graphs,
                    "instances": r.instances,
                    "members": r.members,
                    "non_members": r.non_members,
                    "discrepancies": r.discrepancies,
                    "certificate_failures": r.certificate_failures,
                })
            };
            emit(&json!({
                "general": render(&general),
                "bipartite": render(&bipartite),
                "asym": render(&asym),
                "instances": general.instances + bipartite.instances + asym.instances,
                "ok": ok,
            }));
            Ok(if ok { 0 } else { 3 })
        }
    }
}

/// Parses a `node value` file covering one side of the bipartition and
/// normalizes it to a probability marginal.
fn parse_side_measure(text: &str, g: &Multigraph) -> Result<BTreeMap<usize, Rat>, Failure> {
    let mut out: BTreeMap<usize, Rat> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Failure::Input(Error::input(format!(
                "line {}: expected `node value`, got {:?}",
                lineno + 1,
                line
            ))));
        }
        let i = g.node_index(tokens[0])?;
        let v = Rat::parse(tokens[1]).map_err(Error::Input)?;
        if !v.is_positive() {
            return Err(Failure::Input(Error::input(format!(
                "marginal value for {:?} must be positive",
                tokens[0]
            ))));
        }
        if out.insert(i, v).is_some() {
            return Err(Failure::Input(Error::input(format!(
                "node {:?} given more than one value",
                tokens[0]
            ))));
        }
    }
    let total: Rat = out.values().sum();
    if !total.is_positive() {
        return Err(Failure::Input(Error::input("empty marginal file")));
    }
    Ok(out.into_iter().map(|(i, v)| (i, &v / &total)).collect())
}
