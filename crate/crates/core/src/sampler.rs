//! Importance-sampling estimation of path and path-pair failure probability.
//!
//! Path failure is the union of the node failure events, i.e. a monotone
//! DNF over supply failures with one clause per interior node (for a pair,
//! one clause per cross pair of interior nodes, in lexicographic `(i, j)`
//! order). Each trial picks a clause with probability proportional to its
//! own failure probability, forces its supplies down, samples the remaining
//! supplies, and scores 1 when the chosen clause is the first failed one.
//! The estimate is `b / a` times the sum of clause probabilities.
//!
//! Randomness: trials run in fixed-size chunks; chunk `c` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `c`. Results therefore do not
//! depend on the number of worker threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{probability_product, Network, Path, PathPair, SupplyIdx};
use crate::oracle::{node_clauses, pair_clauses};

const CHUNK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    ImportanceSampling,
    NaiveMonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub method: EstimateMethod,
    pub value: f64,
    /// Relative-error target (importance sampling only).
    pub epsilon: Option<f64>,
    /// Confidence parameter (importance sampling only).
    pub delta: Option<f64>,
    pub trials_a: u64,
    pub successes_b: u64,
    /// Sum of clause failure probabilities; 1 for naive Monte Carlo.
    pub weight_sum: f64,
    pub clause_count: usize,
    pub seed: u64,
}

/// Number of main-loop iterations: `ceil(3 m ln(2/delta) / epsilon^2)`.
pub fn iteration_count(m: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidParameter("clause count must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    Ok((3.0 * m as f64 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as u64)
}

/// A monotone DNF over supply failures, re-indexed to a local universe.
#[derive(Debug, Clone)]
pub(crate) struct Dnf {
    probs: Vec<f64>,
    clauses: Vec<Vec<usize>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Dnf {
    pub(crate) fn new(net: &Network, clauses: &[Vec<SupplyIdx>]) -> Self {
        let mut universe: Vec<SupplyIdx> = clauses.iter().flatten().copied().collect();
        universe.sort_unstable();
        universe.dedup();
        let probs: Vec<f64> = universe.iter().map(|&u| net.p_fail(u)).collect();
        let clauses: Vec<Vec<usize>> = clauses
            .iter()
            .map(|c| c.iter().map(|u| universe.binary_search(u).unwrap()).collect())
            .collect();
        let weights: Vec<f64> = clauses
            .iter()
            .map(|c: &Vec<usize>| probability_product(c.iter().map(|&i| probs[i]), c.len()))
            .collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self {
            probs,
            clauses,
            weights,
            cumulative,
        }
    }

    pub(crate) fn weight_sum(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn choose_clause<R: Rng>(&self, rng: &mut R) -> usize {
        let r = rng.gen::<f64>() * self.weight_sum();
        let i = self.cumulative.partition_point(|&c| c <= r);
        // zero-weight clauses are never selected; guard the r == total edge
        let mut i = i.min(self.clauses.len() - 1);
        while self.weights[i] == 0.0 {
            i -= 1;
        }
        i
    }

    fn clause_failed(&self, clause: usize, failed: &[bool]) -> bool {
        self.clauses[clause].iter().all(|&u| failed[u])
    }

    /// One main-loop iteration: returns the chosen clause, leaving the
    /// sampled failure set in `failed`.
    pub(crate) fn trial<R: Rng>(&self, rng: &mut R, failed: &mut [bool]) -> usize {
        let chosen = self.choose_clause(rng);
        for (slot, &p) in failed.iter_mut().zip(&self.probs) {
            *slot = rng.gen::<f64>() < p;
        }
        for &u in &self.clauses[chosen] {
            failed[u] = true;
        }
        chosen
    }

    fn first_failed(&self, failed: &[bool]) -> Option<usize> {
        (0..self.clauses.len()).find(|&c| self.clause_failed(c, failed))
    }

    #[cfg(test)]
    fn failing_clauses(&self, failed: &[bool]) -> Vec<usize> {
        (0..self.clauses.len())
            .filter(|&c| self.clause_failed(c, failed))
            .collect()
    }

    #[cfg(test)]
    fn universe_len(&self) -> usize {
        self.probs.len()
    }

    fn importance_successes(&self, trials: u64, seed: u64) -> u64 {
        run_chunks(trials, seed, |rng, count| {
            let mut failed = vec![false; self.probs.len()];
            let mut hits = 0;
            for _ in 0..count {
                let chosen = self.trial(rng, &mut failed);
                if self.first_failed(&failed) == Some(chosen) {
                    hits += 1;
                }
            }
            hits
        })
    }

    fn naive_failures(&self, trials: u64, seed: u64) -> u64 {
        run_chunks(trials, seed, |rng, count| {
            let mut failed = vec![false; self.probs.len()];
            let mut hits = 0;
            for _ in 0..count {
                for (slot, &p) in failed.iter_mut().zip(&self.probs) {
                    *slot = rng.gen::<f64>() < p;
                }
                if self.first_failed(&failed).is_some() {
                    hits += 1;
                }
            }
            hits
        })
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunks<F>(trials: u64, seed: u64, work: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> u64 + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            work(&mut chunk_rng(seed, c), count)
        })
        .sum()
}

fn importance_estimate(dnf: &Dnf, epsilon: f64, delta: f64, seed: u64) -> Result<Estimate> {
    let m = dnf.clauses.len();
    let trials = iteration_count(m.max(1), epsilon, delta)?;
    let weight_sum = dnf.weight_sum();
    if m == 0 || weight_sum == 0.0 {
        return Ok(Estimate {
            method: EstimateMethod::ImportanceSampling,
            value: 0.0,
            epsilon: Some(epsilon),
            delta: Some(delta),
            trials_a: 0,
            successes_b: 0,
            weight_sum,
            clause_count: m,
            seed,
        });
    }
    let successes = dnf.importance_successes(trials, seed);
    Ok(Estimate {
        method: EstimateMethod::ImportanceSampling,
        value: (successes as f64 / trials as f64 * weight_sum).min(1.0),
        epsilon: Some(epsilon),
        delta: Some(delta),
        trials_a: trials,
        successes_b: successes,
        weight_sum,
        clause_count: m,
        seed,
    })
}

/// (epsilon, delta)-approximation of the failure probability of `path`.
pub fn estimate_path_failure(net: &Network, path: &Path, epsilon: f64, delta: f64, seed: u64) -> Result<Estimate> {
    let dnf = Dnf::new(net, &node_clauses(net, &path.interior(net)));
    importance_estimate(&dnf, epsilon, delta, seed)
}

/// (epsilon, delta)-approximation of the probability that both paths fail.
pub fn estimate_pair_failure(
    net: &Network,
    pair: &PathPair,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<Estimate> {
    let dnf = Dnf::new(net, &pair_clauses(net, pair));
    importance_estimate(&dnf, epsilon, delta, seed)
}

#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Path(&'a Path),
    Pair(&'a PathPair),
}

/// Plain Monte Carlo: sample every supply, count failing trials.
pub fn naive_monte_carlo(net: &Network, target: Target<'_>, trials: u64, seed: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let clauses = match target {
        Target::Path(path) => node_clauses(net, &path.interior(net)),
        Target::Pair(pair) => pair_clauses(net, pair),
    };
    let dnf = Dnf::new(net, &clauses);
    let failures = dnf.naive_failures(trials, seed);
    Ok(Estimate {
        method: EstimateMethod::NaiveMonteCarlo,
        value: failures as f64 / trials as f64,
        epsilon: None,
        delta: None,
        trials_a: trials,
        successes_b: failures,
        weight_sum: 1.0,
        clause_count: dnf.clauses.len(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain_network, chain_nodes, dnf_network, ladder_network};
    use crate::oracle::{exact_pair_failure, exact_path_failure};
    use std::collections::HashMap;

    fn chain_path(net: &Network) -> Path {
        Path::new(net, chain_nodes(net)).unwrap()
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(3, 0.1, 0.01).unwrap(), 4769);
        assert_eq!(iteration_count(1, 0.5, 0.5).unwrap(), 17);
        // 30 ln(200) / 0.0004 = 397373.97...
        assert_eq!(iteration_count(10, 0.02, 0.01).unwrap(), 397374);
        assert!(iteration_count(0, 0.1, 0.1).is_err());
        assert!(iteration_count(1, 1.0, 0.1).is_err());
        assert!(iteration_count(1, 0.1, 0.0).is_err());
    }

    #[test]
    fn single_clause_is_exact() {
        let net = chain_network(&[&[1, 2, 3]], 0.3);
        for seed in 0..5 {
            let est = estimate_path_failure(&net, &chain_path(&net), 0.1, 0.1, seed).unwrap();
            assert_eq!(est.value, 0.3 * 0.3 * 0.3);
            assert_eq!(est.successes_b, est.trials_a);
        }
    }

    #[test]
    fn identical_supply_sets() {
        let net = chain_network(&[&[1, 2], &[1, 2]], 0.5);
        let est = estimate_path_failure(&net, &chain_path(&net), 0.05, 0.01, 3).unwrap();
        assert!((est.value - 0.25).abs() <= 0.05 * 0.25);
    }

    #[test]
    fn dnf_fixture_within_tolerance() {
        let net = dnf_network();
        let est = estimate_path_failure(&net, &chain_path(&net), 0.05, 0.01, 7).unwrap();
        assert!((est.value - 9.0 / 16.0).abs() <= 0.05 * 9.0 / 16.0);
        assert_eq!(est.trials_a, iteration_count(4, 0.05, 0.01).unwrap());
        assert_eq!(est.value, est.successes_b as f64 / est.trials_a as f64 * est.weight_sum);
    }

    #[test]
    fn deterministic_for_equal_seeds() {
        let net = dnf_network();
        let a = estimate_path_failure(&net, &chain_path(&net), 0.1, 0.1, 42).unwrap();
        let b = estimate_path_failure(&net, &chain_path(&net), 0.1, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let c = estimate_path_failure(&net, &chain_path(&net), 0.1, 0.1, 43).unwrap();
        assert_ne!(a.successes_b, c.successes_b);
    }

    #[test]
    fn zero_normalizer_returns_exact_zero() {
        let net = chain_network(&[&[1], &[2]], 0.0);
        let est = estimate_path_failure(&net, &chain_path(&net), 0.1, 0.1, 1).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.trials_a, 0);
    }

    #[test]
    fn zero_weight_clauses_are_never_chosen() {
        let mut doc = chain_network(&[&[1], &[2], &[3]], 0.4).to_doc();
        doc.supply_nodes[1].p_fail = 0.0;
        let net = Network::from_doc(&doc).unwrap();
        let exact = exact_path_failure(&net, &chain_path(&net)).unwrap().probability;
        let est = estimate_path_failure(&net, &chain_path(&net), 0.05, 0.01, 9).unwrap();
        assert!((est.value - exact).abs() <= 0.05 * exact);
    }

    #[test]
    fn pair_with_itself_matches_single_path() {
        let net = dnf_network();
        let path = chain_path(&net);
        let pair = PathPair::new(&net, path.clone(), path.clone(), false).unwrap();
        let both = estimate_pair_failure(&net, &pair, 0.05, 0.01, 5).unwrap();
        assert_eq!(both.clause_count, 16);
        assert!((both.value - 9.0 / 16.0).abs() <= 0.05 * 9.0 / 16.0);
    }

    #[test]
    fn supply_disjoint_pair() {
        let mut doc = ladder_network(&[&[1]], &[&[2]], 0.1).to_doc();
        doc.supply_nodes[1].p_fail = 0.2;
        let net = Network::from_doc(&doc).unwrap();
        let pair = PathPair::new(
            &net,
            Path::parse(&net, "s,a1,t").unwrap(),
            Path::parse(&net, "s,b1,t").unwrap(),
            true,
        )
        .unwrap();
        assert!((exact_pair_failure(&net, &pair).unwrap().probability - 0.02).abs() < 1e-15);
        // single clause {u1, u2}: exact for every seed
        let est = estimate_pair_failure(&net, &pair, 0.1, 0.1, 0).unwrap();
        assert!((est.value - 0.02).abs() < 1e-15);
    }

    #[test]
    fn naive_extremes() {
        let net = chain_network(&[&[1], &[2, 3]], 1.0);
        let path = chain_path(&net);
        assert_eq!(naive_monte_carlo(&net, Target::Path(&path), 100, 1).unwrap().value, 1.0);
        let net = chain_network(&[&[1], &[2, 3]], 0.0);
        assert_eq!(naive_monte_carlo(&net, Target::Path(&path), 100, 1).unwrap().value, 0.0);
        assert!(naive_monte_carlo(&net, Target::Path(&path), 0, 1).is_err());
    }

    #[test]
    fn naive_dnf_within_three_sigma() {
        let net = dnf_network();
        let path = chain_path(&net);
        let trials = 1_000_000u64;
        let est = naive_monte_carlo(&net, Target::Path(&path), trials, 17).unwrap();
        let p: f64 = 9.0 / 16.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((est.value - p).abs() <= 3.0 * sigma, "{} vs {p}", est.value);
    }

    #[test]
    fn unbiased_over_seeds() {
        let mut doc = chain_network(&[&[1, 2], &[2, 3], &[3], &[1, 4]], 0.3).to_doc();
        for (i, s) in doc.supply_nodes.iter_mut().enumerate() {
            s.p_fail = 0.15 + 0.1 * i as f64;
        }
        let net = Network::from_doc(&doc).unwrap();
        let path = chain_path(&net);
        let exact = exact_path_failure(&net, &path).unwrap().probability;
        let values: Vec<f64> = (0..200)
            .map(|seed| estimate_path_failure(&net, &path, 0.3, 0.3, seed).unwrap().value)
            .collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se, "mean {mean}, exact {exact}, se {se}");
    }

    #[test]
    fn chosen_clause_uniform_given_failure_set() {
        let net = dnf_network();
        let dnf = Dnf::new(&net, &node_clauses(&net, &chain_path(&net).interior(&net)));
        let mut rng = chunk_rng(99, 0);
        let mut failed = vec![false; dnf.universe_len()];
        // failure set -> (failing clauses, counts per chosen clause)
        type Tally = (Vec<usize>, HashMap<usize, u64>);
        let mut seen: HashMap<Vec<bool>, Tally> = HashMap::new();
        for _ in 0..400_000 {
            let chosen = dnf.trial(&mut rng, &mut failed);
            let entry = seen
                .entry(failed.clone())
                .or_insert_with(|| (dnf.failing_clauses(&failed), HashMap::new()));
            assert!(entry.0.contains(&chosen));
            *entry.1.entry(chosen).or_default() += 1;
        }
        for (_, (failing, counts)) in seen {
            let total: u64 = counts.values().sum();
            if total < 5000 {
                continue;
            }
            let expected = total as f64 / failing.len() as f64;
            let sigma = (expected * (1.0 - 1.0 / failing.len() as f64)).sqrt();
            for c in failing {
                let got = *counts.get(&c).unwrap_or(&0) as f64;
                assert!((got - expected).abs() <= 4.0 * sigma, "clause {c}: {got} vs {expected}");
            }
        }
    }
}
