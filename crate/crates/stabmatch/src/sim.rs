//! Discrete-time simulator of the general stochastic matching model.
//!
//! Arrivals are IID from the normalized measure; an incoming item matches a
//! stored compatible item according to the policy and both leave
//! immediately, otherwise it joins the buffer. A class with a self-loop may
//! match an incoming item of its own class.
//!
//! RNG contract: `ChaCha8` (rand_chacha), seeded with the master seed via
//! `seed_from_u64`; stream `2*replication` drives arrivals and stream
//! `2*replication + 1` drives policy tie-breaks, so runs are reproducible
//! bit-for-bit across platforms and replications are independent.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::measure::NodeMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingPolicy {
    /// First Come, First Matched: the oldest stored compatible item.
    Fcfm,
    /// Match the Longest: the compatible class with the most stored items,
    /// ties uniform at random; the oldest item within the class.
    Ml,
    /// Uniform over all stored compatible items.
    UniformRandom,
}

impl MatchingPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchingPolicy::Fcfm => "fcfm",
            MatchingPolicy::Ml => "ml",
            MatchingPolicy::UniformRandom => "random",
        }
    }

    pub fn parse(s: &str) -> Result<MatchingPolicy> {
        match s {
            "fcfm" => Ok(MatchingPolicy::Fcfm),
            "ml" => Ok(MatchingPolicy::Ml),
            "random" => Ok(MatchingPolicy::UniformRandom),
            other => Err(Error::input(format!(
                "unknown policy {other:?} (expected fcfm, ml or random)"
            ))),
        }
    }
}

pub(crate) fn arrival_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replication);
    rng
}

pub(crate) fn policy_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replication + 1);
    rng
}

/// Inverse-CDF sampler over node classes. Cumulative boundaries are double
/// precision; the per-draw bias is far below the simulation tolerances.
pub(crate) struct ClassSampler {
    cumulative: Vec<f64>,
}

impl ClassSampler {
    pub(crate) fn new(weights: &[f64]) -> ClassSampler {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in weights {
            acc += w;
            cumulative.push(acc);
        }
        ClassSampler { cumulative }
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        for (k, c) in self.cumulative.iter().enumerate() {
            if u < *c {
                return k;
            }
        }
        self.cumulative.len() - 1
    }
}

/// Empirical matching rates: integer match counters per unordered class
/// pair, divided by the step count once at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub counts: BTreeMap<(usize, usize), u64>,
    pub n: u64,
    pub seed: u64,
    pub policy: MatchingPolicy,
    pub max_buffer: u64,
    pub mean_buffer: f64,
}

impl RateEstimate {
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        *self.counts.get(&key).unwrap_or(&0) as f64 / self.n as f64
    }

    pub fn theta_map(&self) -> BTreeMap<(usize, usize), f64> {
        self.counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.n as f64))
            .collect()
    }
}

pub(crate) struct SimOutput {
    pub estimate: RateEstimate,
    /// `(step, buffer size)` samples, every `ceil(n/100)` steps.
    pub samples: Vec<(u64, u64)>,
}

pub(crate) struct Buffers {
    pub(crate) queues: Vec<VecDeque<u64>>,
    pub(crate) counts: Vec<u64>,
    pub(crate) total: u64,
}

impl Buffers {
    pub(crate) fn new(n: usize) -> Buffers {
        Buffers {
            queues: vec![VecDeque::new(); n],
            counts: vec![0; n],
            total: 0,
        }
    }

    pub(crate) fn push(&mut self, class: usize, stamp: u64) {
        self.queues[class].push_back(stamp);
        self.counts[class] += 1;
        self.total += 1;
    }

    pub(crate) fn pop_oldest(&mut self, class: usize) -> u64 {
        let stamp = self.queues[class].pop_front().expect("class nonempty");
        self.counts[class] -= 1;
        self.total -= 1;
        stamp
    }
}

/// Applies the matching policy among candidate classes that hold at least
/// one stored item; within the chosen class the oldest item is matched.
pub(crate) fn pick_match(
    policy: MatchingPolicy,
    candidates: &[usize],
    buf: &Buffers,
    rng: &mut ChaCha8Rng,
) -> usize {
    debug_assert!(!candidates.is_empty());
    match policy {
        MatchingPolicy::Fcfm => candidates
            .iter()
            .copied()
            .min_by_key(|&d| *buf.queues[d].front().expect("candidate nonempty"))
            .expect("candidates nonempty"),
        MatchingPolicy::Ml => {
            let best = candidates
                .iter()
                .map(|&d| buf.counts[d])
                .max()
                .expect("candidates nonempty");
            let tied: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&d| buf.counts[d] == best)
                .collect();
            if tied.len() == 1 {
                tied[0]
            } else {
                tied[rng.random_range(0..tied.len())]
            }
        }
        MatchingPolicy::UniformRandom => {
            let total: u64 = candidates.iter().map(|&d| buf.counts[d]).sum();
            let mut r = rng.random_range(0..total);
            let mut chosen = candidates[0];
            for &d in candidates {
                if r < buf.counts[d] {
                    chosen = d;
                    break;
                }
                r -= buf.counts[d];
            }
            chosen
        }
    }
}

/// One simulation run. `check_invariants` turns on the online structural
/// assertions used by the fuzz suites.
pub(crate) fn run_general(
    g: &Multigraph,
    mu: &NodeMeasure,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
    replication: u64,
    check_invariants: bool,
) -> Result<SimOutput> {
    if steps == 0 {
        return Err(Error::input("steps must be at least 1"));
    }
    if mu.len() != g.node_count() {
        return Err(Error::input("measure does not match the graph"));
    }
    if !mu.is_normalized() {
        return Err(Error::input(
            "the arrival measure must be normalized (total mass 1)",
        ));
    }
    let n = g.node_count();
    let weights: Vec<f64> = mu.values().iter().map(|r| r.to_f64()).collect();
    let sampler = ClassSampler::new(&weights);
    let mut arrivals_rng = arrival_rng(seed, replication);
    let mut choice_rng = policy_rng(seed, replication);

    let mut buf = Buffers::new(n);
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut arrivals = vec![0u64; n];
    let mut departures = vec![0u64; n];
    let mut max_buffer = 0u64;
    let mut sum_buffer: u128 = 0;
    let sample_every = steps.div_ceil(100).max(1);
    let mut samples = Vec::with_capacity(101);
    let mut candidates: Vec<usize> = Vec::with_capacity(n);

    for step in 1..=steps {
        let c = sampler.draw(&mut arrivals_rng);
        arrivals[c] += 1;
        candidates.clear();
        for &(d, _) in g.adjacency(c) {
            if buf.counts[d] > 0 {
                candidates.push(d);
            }
        }
        let mut matched: Option<usize> = None;
        if candidates.is_empty() {
            buf.push(c, step);
            if check_invariants {
                // stored classes stay an independent set: no stored
                // neighbor of c, and at most one item of a looped class
                for &(d, _) in g.adjacency(c) {
                    let limit = u64::from(d == c);
                    assert!(
                        buf.counts[d] <= limit,
                        "buffer independence violated at class {}",
                        g.name(c)
                    );
                }
            }
        } else {
            let d = pick_match(policy, &candidates, &buf, &mut choice_rng);
            buf.pop_oldest(d);
            *counts.entry((c.min(d), c.max(d))).or_insert(0) += 1;
            departures[c] += 1;
            departures[d] += 1;
            matched = Some(d);
        }
        max_buffer = max_buffer.max(buf.total);
        sum_buffer += buf.total as u128;
        if check_invariants {
            for x in std::iter::once(c).chain(matched) {
                assert_eq!(
                    arrivals[x],
                    departures[x] + buf.counts[x],
                    "counting identity violated at class {}",
                    g.name(x)
                );
            }
        }
        if step % sample_every == 0 {
            samples.push((step, buf.total));
        }
    }
    if check_invariants {
        for x in 0..n {
            assert_eq!(arrivals[x], departures[x] + buf.counts[x]);
        }
    }

    Ok(SimOutput {
        estimate: RateEstimate {
            counts,
            n: steps,
            seed,
            policy,
            max_buffer,
            mean_buffer: sum_buffer as f64 / steps as f64,
        },
        samples,
    })
}

/// Runs the matching model for `steps` arrivals; deterministic given
/// `(graph, measure, policy, steps, seed)`.
pub fn simulate_general(
    g: &Multigraph,
    mu: &NodeMeasure,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
) -> Result<RateEstimate> {
    run_general(g, mu, policy, steps, seed, 0, false).map(|o| o.estimate)
}

/// Same run with the online structural assertions enabled (buffer
/// independence and the per-class counting identity); any violation
/// panics. Used by the fuzz suites.
pub fn simulate_general_checked(
    g: &Multigraph,
    mu: &NodeMeasure,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
) -> Result<RateEstimate> {
    run_general(g, mu, policy, steps, seed, 0, true).map(|o| o.estimate)
}

/// Independent replications (streams split from the same master seed), run
/// in parallel and merged by summing the match counters.
pub fn simulate_general_replicated(
    g: &Multigraph,
    mu: &NodeMeasure,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
    replications: u64,
) -> Result<(RateEstimate, f64)> {
    if replications == 0 {
        return Err(Error::input("replications must be at least 1"));
    }
    let outputs: Vec<SimOutput> = (0..replications)
        .into_par_iter()
        .map(|rep| run_general(g, mu, policy, steps, seed, rep, false))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut n = 0u64;
    let mut max_buffer = 0u64;
    let mut mean_acc = 0.0;
    let mut slope_acc = 0.0;
    for out in &outputs {
        for (&k, &c) in &out.estimate.counts {
            *counts.entry(k).or_insert(0) += c;
        }
        n += out.estimate.n;
        max_buffer = max_buffer.max(out.estimate.max_buffer);
        mean_acc += out.estimate.mean_buffer * out.estimate.n as f64;
        slope_acc += least_squares_slope(&out.samples);
    }
    Ok((
        RateEstimate {
            counts,
            n,
            seed,
            policy,
            max_buffer,
            mean_buffer: mean_acc / n as f64,
        },
        slope_acc / replications as f64,
    ))
}

/// Residuals of the rate-balance identity
/// `mu(i) = sum_j (1 + [j = i]) theta[i,j]`; they vanish as the run grows
/// on stable instances.
pub fn balance_residual(g: &Multigraph, est: &RateEstimate, mu: &NodeMeasure) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| {
            let mut mass = 0.0;
            for &(j, _) in g.adjacency(i) {
                let factor = if j == i { 2.0 } else { 1.0 };
                mass += factor * est.theta(i, j);
            }
            mu.get(i).to_f64() - mass
        })
        .collect()
}

/// Empirical weights `alpha(i,j) = (1 + [i = j]) theta[i,j]`, keyed per
/// edge; their weighted measure reproduces `mu` up to the balance
/// residuals.
pub fn weights_from_rates(g: &Multigraph, est: &RateEstimate) -> BTreeMap<(usize, usize), f64> {
    g.edges()
        .iter()
        .map(|e| {
            let factor = if e.is_loop() { 2.0 } else { 1.0 };
            ((e.u, e.v), factor * est.theta(e.u, e.v))
        })
        .collect()
}

pub(crate) fn least_squares_slope(samples: &[(u64, u64)]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|&(x, _)| x as f64).sum::<f64>() / n;
    let mean_y = samples.iter().map(|&(_, y)| y as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in samples {
        let dx = x as f64 - mean_x;
        cov += dx * (y as f64 - mean_y);
        var += dx * dx;
    }
    cov / var
}

/// Heuristic divergence threshold on the buffer growth rate, in items per
/// step. Not a proof of (in)stability.
pub const SLOPE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub slope: f64,
    pub samples: Vec<(u64, u64)>,
    pub max_buffer: u64,
    pub mean_buffer: f64,
    /// `"stable-looking"` or `"divergent-looking"`; heuristic only.
    pub verdict: &'static str,
}

/// Records the buffer size along the run and fits a least-squares slope.
pub fn stability_diagnostic(
    g: &Multigraph,
    mu: &NodeMeasure,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
) -> Result<StabilityReport> {
    let out = run_general(g, mu, policy, steps, seed, 0, false)?;
    let slope = least_squares_slope(&out.samples);
    Ok(StabilityReport {
        slope,
        samples: out.samples,
        max_buffer: out.estimate.max_buffer,
        mean_buffer: out.estimate.mean_buffer,
        verdict: if slope.abs() <= SLOPE_THRESHOLD {
            "stable-looking"
        } else {
            "divergent-looking"
        },
    })
}
