//! Simulator of the extended bipartite matching model: one item per side
//! arrives at each step. The incoming side-2 item first looks for a stored
//! compatible side-1 item, then the incoming side-1 item looks for a stored
//! compatible side-2 item; if neither matched and the two incomers are
//! compatible they are matched together, otherwise the unmatched incomers
//! are stored. Same RNG contract as the general simulator.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::measure::EdgeWeights;
use crate::rat::Rat;
use crate::sim::{
    arrival_rng, least_squares_slope, pick_match, policy_rng, Buffers, ClassSampler,
    MatchingPolicy,
};
use crate::stability::weighted_values;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coupling {
    /// Independent product of the two marginals (the canonical case).
    Product,
    /// Explicit joint law on pairs `(side-1 class, side-2 class)`.
    Joint(Vec<((usize, usize), Rat)>),
}

/// Pairwise arrival law: normalized full-support marginals on the two sides
/// of the bipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairArrivalLaw {
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
    pub marginal1: BTreeMap<usize, Rat>,
    pub marginal2: BTreeMap<usize, Rat>,
    pub coupling: Coupling,
}

impl PairArrivalLaw {
    /// Product coupling. Each marginal must be a normalized positive
    /// measure supported on exactly one side of the bipartition; which
    /// marginal belongs to which side is inferred from the supports.
    pub fn product(
        g: &Multigraph,
        marginal1: BTreeMap<usize, Rat>,
        marginal2: BTreeMap<usize, Rat>,
    ) -> Result<PairArrivalLaw> {
        let bip = g
            .bipartition()
            .ok_or_else(|| Error::input("graph is not bipartite"))?;
        let side_of = |m: &BTreeMap<usize, Rat>| -> Result<Vec<usize>> {
            let support: Vec<usize> = m.keys().copied().collect();
            if support == bip.part1 {
                Ok(bip.part1.clone())
            } else if support == bip.part2 {
                Ok(bip.part2.clone())
            } else {
                Err(Error::input(
                    "marginal support must be exactly one side of the bipartition",
                ))
            }
        };
        let side1 = side_of(&marginal1)?;
        let side2 = side_of(&marginal2)?;
        if side1 == side2 {
            return Err(Error::input("marginals must live on opposite sides"));
        }
        for m in [&marginal1, &marginal2] {
            if m.values().any(|v| !v.is_positive()) {
                return Err(Error::input("marginals must have full support"));
            }
            if m.values().sum::<Rat>() != Rat::one() {
                return Err(Error::input("marginals must sum to 1"));
            }
        }
        Ok(PairArrivalLaw {
            side1,
            side2,
            marginal1,
            marginal2,
            coupling: Coupling::Product,
        })
    }

    /// Explicit joint law; marginals are derived and validated.
    pub fn joint(g: &Multigraph, pairs: Vec<((usize, usize), Rat)>) -> Result<PairArrivalLaw> {
        let bip = g
            .bipartition()
            .ok_or_else(|| Error::input("graph is not bipartite"))?;
        let total: Rat = pairs.iter().map(|(_, p)| p).sum();
        if total != Rat::one() {
            return Err(Error::input("joint law must sum to 1"));
        }
        let mut marginal1: BTreeMap<usize, Rat> = BTreeMap::new();
        let mut marginal2: BTreeMap<usize, Rat> = BTreeMap::new();
        for &((i, j), ref p) in &pairs {
            if !bip.part1.contains(&i) && !bip.part2.contains(&i) {
                return Err(Error::input(format!("unknown class index {i}")));
            }
            if p.is_negative() {
                return Err(Error::input("joint probabilities must be nonnegative"));
            }
            let (a, b) = if bip.part1.contains(&i) { (i, j) } else { (j, i) };
            if !bip.part1.contains(&a) || !bip.part2.contains(&b) {
                return Err(Error::input(
                    "joint law pairs must couple the two sides of the bipartition",
                ));
            }
            *marginal1.entry(a).or_insert_with(Rat::zero) += p;
            *marginal2.entry(b).or_insert_with(Rat::zero) += p;
        }
        for (side, marginal) in [(&bip.part1, &marginal1), (&bip.part2, &marginal2)] {
            let support: Vec<usize> = marginal.keys().copied().collect();
            if &support != side || marginal.values().any(|v| !v.is_positive()) {
                return Err(Error::input("joint law marginals must have full support"));
            }
        }
        Ok(PairArrivalLaw {
            side1: bip.part1,
            side2: bip.part2,
            marginal1,
            marginal2,
            coupling: Coupling::Joint(pairs),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteRateEstimate {
    /// Matches per edge, keyed by the canonical node pair.
    pub counts: BTreeMap<(usize, usize), u64>,
    pub n: u64,
    pub seed: u64,
    pub policy: MatchingPolicy,
    pub max_buffer_side1: u64,
    pub max_buffer_side2: u64,
    /// Mean total stored items (both sides) per step.
    pub mean_buffer: f64,
}

impl BipartiteRateEstimate {
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        *self.counts.get(&key).unwrap_or(&0) as f64 / self.n as f64
    }
}

enum PairSampler {
    Product(ClassSampler, Vec<usize>, ClassSampler, Vec<usize>),
    Joint(ClassSampler, Vec<(usize, usize)>),
}

impl PairSampler {
    fn new(law: &PairArrivalLaw) -> PairSampler {
        match &law.coupling {
            Coupling::Product => {
                let w1: Vec<f64> = law.side1.iter().map(|i| law.marginal1[i].to_f64()).collect();
                let w2: Vec<f64> = law.side2.iter().map(|j| law.marginal2[j].to_f64()).collect();
                PairSampler::Product(
                    ClassSampler::new(&w1),
                    law.side1.clone(),
                    ClassSampler::new(&w2),
                    law.side2.clone(),
                )
            }
            Coupling::Joint(pairs) => {
                let w: Vec<f64> = pairs.iter().map(|(_, p)| p.to_f64()).collect();
                PairSampler::Joint(
                    ClassSampler::new(&w),
                    pairs.iter().map(|&(ij, _)| ij).collect(),
                )
            }
        }
    }

    /// Draws `(side-1 class, side-2 class)`; under the product coupling the
    /// side-1 class is drawn first.
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> (usize, usize) {
        match self {
            PairSampler::Product(s1, side1, s2, side2) => {
                let i = side1[s1.draw(rng)];
                let j = side2[s2.draw(rng)];
                (i, j)
            }
            PairSampler::Joint(s, pairs) => pairs[s.draw(rng)],
        }
    }
}

pub(crate) struct BipSimOutput {
    pub estimate: BipartiteRateEstimate,
    pub samples: Vec<(u64, u64)>,
}

pub(crate) fn run_bipartite(
    g: &Multigraph,
    law: &PairArrivalLaw,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
    replication: u64,
    check_invariants: bool,
) -> Result<BipSimOutput> {
    if steps == 0 {
        return Err(Error::input("steps must be at least 1"));
    }
    let n = g.node_count();
    let mut in_side1 = vec![false; n];
    for &i in &law.side1 {
        in_side1[i] = true;
    }
    let sampler = PairSampler::new(law);
    let mut arrivals_rng = arrival_rng(seed, replication);
    let mut choice_rng = policy_rng(seed, replication);

    let mut buf = Buffers::new(n);
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut arrivals = vec![0u64; n];
    let mut departures = vec![0u64; n];
    let mut side_total = [0u64; 2];
    let mut max_side = [0u64; 2];
    let mut sum_buffer: u128 = 0;
    let sample_every = steps.div_ceil(100).max(1);
    let mut samples = Vec::with_capacity(101);
    let mut candidates: Vec<usize> = Vec::with_capacity(n);

    let record = |counts: &mut BTreeMap<(usize, usize), u64>,
                      departures: &mut Vec<u64>,
                      a: usize,
                      b: usize| {
        *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        departures[a] += 1;
        departures[b] += 1;
    };

    for step in 1..=steps {
        let (i, j) = sampler.draw(&mut arrivals_rng);
        arrivals[i] += 1;
        arrivals[j] += 1;

        // the incoming side-2 item looks for a stored side-1 item first
        candidates.clear();
        for &(d, _) in g.adjacency(j) {
            if buf.counts[d] > 0 {
                candidates.push(d);
            }
        }
        let j_matched = if candidates.is_empty() {
            None
        } else {
            let d = pick_match(policy, &candidates, &buf, &mut choice_rng);
            buf.pop_oldest(d);
            side_total[0] -= 1;
            record(&mut counts, &mut departures, d, j);
            Some(d)
        };

        // then the incoming side-1 item looks at the stored side-2 items
        candidates.clear();
        for &(d, _) in g.adjacency(i) {
            if buf.counts[d] > 0 {
                candidates.push(d);
            }
        }
        let i_matched = if candidates.is_empty() {
            None
        } else {
            let d = pick_match(policy, &candidates, &buf, &mut choice_rng);
            buf.pop_oldest(d);
            side_total[1] -= 1;
            record(&mut counts, &mut departures, i, d);
            Some(d)
        };

        match (j_matched, i_matched) {
            (None, None) => {
                if g.edge_index(i, j).is_some() {
                    // the two incoming items are compatible: matched together
                    record(&mut counts, &mut departures, i, j);
                } else {
                    buf.push(i, step);
                    side_total[0] += 1;
                    buf.push(j, step);
                    side_total[1] += 1;
                }
            }
            (Some(_), None) => {
                buf.push(i, step);
                side_total[0] += 1;
            }
            (None, Some(_)) => {
                buf.push(j, step);
                side_total[1] += 1;
            }
            (Some(_), Some(_)) => {}
        }

        max_side[0] = max_side[0].max(side_total[0]);
        max_side[1] = max_side[1].max(side_total[1]);
        sum_buffer += buf.total as u128;
        if check_invariants {
            assert_eq!(
                side_total[0], side_total[1],
                "stored side counts diverged at step {step}"
            );
            // no stored pair of compatible items across the sides
            for x in [i, j] {
                if buf.counts[x] > 0 {
                    for &(d, _) in g.adjacency(x) {
                        assert!(
                            buf.counts[d] == 0,
                            "cross-side independence violated at {}",
                            g.name(x)
                        );
                    }
                }
            }
            for x in std::iter::once(i)
                .chain(std::iter::once(j))
                .chain(j_matched)
                .chain(i_matched)
            {
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

    Ok(BipSimOutput {
        estimate: BipartiteRateEstimate {
            counts,
            n: steps,
            seed,
            policy,
            max_buffer_side1: max_side[0],
            max_buffer_side2: max_side[1],
            mean_buffer: sum_buffer as f64 / steps as f64,
        },
        samples,
    })
}

/// Runs the extended bipartite matching model; deterministic given
/// `(graph, law, policy, steps, seed)`.
pub fn simulate_bipartite(
    g: &Multigraph,
    law: &PairArrivalLaw,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
) -> Result<BipartiteRateEstimate> {
    run_bipartite(g, law, policy, steps, seed, 0, false).map(|o| o.estimate)
}

/// Same run with the online structural assertions enabled (cross-side
/// independence, equal stored counts, counting identities); any violation
/// panics. Used by the fuzz suites.
pub fn simulate_bipartite_checked(
    g: &Multigraph,
    law: &PairArrivalLaw,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
) -> Result<BipartiteRateEstimate> {
    run_bipartite(g, law, policy, steps, seed, 0, true).map(|o| o.estimate)
}

/// Parallel replications merged by count-summing, plus the mean buffer
/// slope across replications.
pub fn simulate_bipartite_replicated(
    g: &Multigraph,
    law: &PairArrivalLaw,
    policy: MatchingPolicy,
    steps: u64,
    seed: u64,
    replications: u64,
) -> Result<(BipartiteRateEstimate, f64)> {
    if replications == 0 {
        return Err(Error::input("replications must be at least 1"));
    }
    let outputs: Vec<BipSimOutput> = (0..replications)
        .into_par_iter()
        .map(|rep| run_bipartite(g, law, policy, steps, seed, rep, false))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut n = 0u64;
    let mut max1 = 0u64;
    let mut max2 = 0u64;
    let mut mean_acc = 0.0;
    let mut slope_acc = 0.0;
    for out in &outputs {
        for (&k, &c) in &out.estimate.counts {
            *counts.entry(k).or_insert(0) += c;
        }
        n += out.estimate.n;
        max1 = max1.max(out.estimate.max_buffer_side1);
        max2 = max2.max(out.estimate.max_buffer_side2);
        mean_acc += out.estimate.mean_buffer * out.estimate.n as f64;
        slope_acc += least_squares_slope(&out.samples);
    }
    Ok((
        BipartiteRateEstimate {
            counts,
            n,
            seed,
            policy,
            max_buffer_side1: max1,
            max_buffer_side2: max2,
            mean_buffer: mean_acc / n as f64,
        },
        slope_acc / replications as f64,
    ))
}

/// Residuals of the bipartite balance identity
/// `mu~1(i) = sum_j theta[i,j]` and `mu~2(j) = sum_i theta[i,j]`.
pub fn bipartite_balance_residual(
    g: &Multigraph,
    est: &BipartiteRateEstimate,
    law: &PairArrivalLaw,
) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for (side, marginal) in [
        (&law.side1, &law.marginal1),
        (&law.side2, &law.marginal2),
    ] {
        for &x in side {
            let mass: f64 = g.adjacency(x).iter().map(|&(d, _)| est.theta(x, d)).sum();
            out.insert(x, marginal[&x].to_f64() - mass);
        }
    }
    out
}

/// Conditional probability measures of edge weights: the weighted measure
/// restricted to each side and renormalized by the side mass.
pub fn conditional_measures_from_weights(
    g: &Multigraph,
    w: &EdgeWeights,
) -> Result<(BTreeMap<usize, Rat>, BTreeMap<usize, Rat>)> {
    let bip = g
        .bipartition()
        .ok_or_else(|| Error::input("graph is not bipartite"))?;
    let values = weighted_values(g, w)?;
    let conditional = |side: &[usize]| -> Result<BTreeMap<usize, Rat>> {
        let total: Rat = side.iter().map(|&i| &values[i]).sum();
        if !total.is_positive() {
            return Err(Error::input("side has zero total weight"));
        }
        Ok(side.iter().map(|&i| (i, &values[i] / &total)).collect())
    };
    Ok((conditional(&bip.part1)?, conditional(&bip.part2)?))
}

/// Empirical weights from bipartite matching rates: `alpha(i,j) =
/// theta_B[i,j]`, keyed per edge.
pub fn weights_from_bipartite_rates(
    g: &Multigraph,
    est: &BipartiteRateEstimate,
) -> BTreeMap<(usize, usize), f64> {
    g.edges()
        .iter()
        .map(|e| ((e.u, e.v), est.theta(e.u, e.v)))
        .collect()
}
