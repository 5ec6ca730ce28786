//! Exact reference computations by exhaustive enumeration.
//!
//! Everything here is exponential-time and bounded by explicit caps. The
//! rest of the crate is tested against these functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{union_of, Network, NodeIdx, Path, PathPair, SupplyIdx};

pub const DEFAULT_SUPPLY_CAP: usize = 22;
pub const DEFAULT_PATH_BUDGET: usize = 100_000;
const MAX_SUPPLY_CAP: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum number of supply nodes enumerated (2^cap subsets).
    pub supply_cap: usize,
    /// Maximum number of simple s-t paths (or path pairs) enumerated.
    pub path_budget: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            supply_cap: DEFAULT_SUPPLY_CAP,
            path_budget: DEFAULT_PATH_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactResult {
    pub probability: f64,
    pub enumerated_supply_count: usize,
    pub enumeration_size: u64,
}

/// Probability that at least one clause has all of its supplies failed.
///
/// The clause family is first reduced to its inclusion-minimal members;
/// supplies that appear only in dropped clauses marginalize out exactly.
/// The remaining supplies are enumerated over all 2^n failure subsets in a
/// fixed order, so equal minimal families give bit-identical results.
pub(crate) fn union_failure(
    net: &Network,
    clauses: &[Vec<SupplyIdx>],
    supply_cap: usize,
) -> Result<ExactResult> {
    let mut family: Vec<&Vec<SupplyIdx>> = clauses.iter().collect();
    family.sort();
    family.dedup();
    let minimal: Vec<&Vec<SupplyIdx>> = family
        .iter()
        .filter(|c| {
            !family
                .iter()
                .any(|o| o.len() < c.len() && crate::model::is_subset(o, c))
        })
        .copied()
        .collect();
    if minimal.is_empty() {
        return Ok(ExactResult {
            probability: 0.0,
            enumerated_supply_count: 0,
            enumeration_size: 1,
        });
    }

    let mut universe: Vec<SupplyIdx> = minimal.iter().flat_map(|c| c.iter().copied()).collect();
    universe.sort_unstable();
    universe.dedup();
    let n = universe.len();
    let cap = supply_cap.min(MAX_SUPPLY_CAP);
    if n > cap {
        return Err(Error::OracleTooLarge { supplies: n, cap });
    }
    let bit = |u: SupplyIdx| 1u64 << universe.binary_search(&u).unwrap();
    let masks: Vec<u64> = minimal
        .iter()
        .map(|c| c.iter().fold(0, |m, &u| m | bit(u)))
        .collect();
    let probs: Vec<f64> = universe.iter().map(|&u| net.p_fail(u)).collect();

    let low_bits = n / 2;
    let low = subset_table(&probs[..low_bits]);
    let high = subset_table(&probs[low_bits..]);
    let low_mask = (1u64 << low_bits) - 1;

    let mut sum = NeumaierSum::default();
    let size = 1u64 << n;
    for failed in 0..size {
        if masks.iter().any(|&m| covers(failed, m)) {
            sum.add(low[(failed & low_mask) as usize] * high[(failed >> low_bits) as usize]);
        }
    }
    Ok(ExactResult {
        probability: sum.value().clamp(0.0, 1.0),
        enumerated_supply_count: n,
        enumeration_size: size,
    })
}

fn covers(set: u64, mask: u64) -> bool {
    set & mask == mask
}

/// Probability of each failure subset of `probs`, indexed by bit mask.
fn subset_table(probs: &[f64]) -> Vec<f64> {
    let mut table = vec![1.0];
    for &p in probs {
        let mut next = Vec::with_capacity(table.len() * 2);
        next.extend(table.iter().map(|w| w * (1.0 - p)));
        next.extend(table.iter().map(|w| w * p));
        table = next;
    }
    table
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn node_clauses(net: &Network, nodes: &[NodeIdx]) -> Vec<Vec<SupplyIdx>> {
    nodes
        .iter()
        .filter_map(|&v| net.failure_set(v).map(<[_]>::to_vec))
        .collect()
}

pub(crate) fn pair_clauses(net: &Network, pair: &PathPair) -> Vec<Vec<SupplyIdx>> {
    let first = node_clauses(net, &pair.first.interior(net));
    let second = node_clauses(net, &pair.second.interior(net));
    let mut clauses = Vec::with_capacity(first.len() * second.len());
    for a in &first {
        for b in &second {
            clauses.push(union_of(a, b));
        }
    }
    clauses
}

/// Exact failure probability of the node list (terminals ignored).
pub fn exact_nodes_failure(net: &Network, nodes: &[NodeIdx], limits: OracleLimits) -> Result<ExactResult> {
    union_failure(net, &node_clauses(net, nodes), limits.supply_cap)
}

pub fn exact_path_failure(net: &Network, path: &Path) -> Result<ExactResult> {
    exact_path_failure_with(net, path, OracleLimits::default())
}

pub fn exact_path_failure_with(net: &Network, path: &Path, limits: OracleLimits) -> Result<ExactResult> {
    exact_nodes_failure(net, &path.interior(net), limits)
}

/// Probability that both paths of the pair fail.
pub fn exact_pair_failure(net: &Network, pair: &PathPair) -> Result<ExactResult> {
    exact_pair_failure_with(net, pair, OracleLimits::default())
}

pub fn exact_pair_failure_with(net: &Network, pair: &PathPair, limits: OracleLimits) -> Result<ExactResult> {
    union_failure(net, &pair_clauses(net, pair), limits.supply_cap)
}

/// All simple s-t paths, in lexicographic node-id order. Terminals only
/// appear as endpoints.
pub fn enumerate_simple_paths(net: &Network, budget: usize) -> Result<Vec<Path>> {
    let (s, t) = net.require_terminals()?;
    let mut paths = Vec::new();
    let mut stack = vec![s];
    let mut on_path = vec![false; net.demand_count()];
    on_path[s] = true;
    extend_paths(net, t, &mut stack, &mut on_path, &mut paths, budget)?;
    Ok(paths)
}

fn extend_paths(
    net: &Network,
    t: NodeIdx,
    stack: &mut Vec<NodeIdx>,
    on_path: &mut [bool],
    out: &mut Vec<Path>,
    budget: usize,
) -> Result<()> {
    let last = *stack.last().unwrap();
    for &next in net.neighbors(last) {
        if on_path[next] {
            continue;
        }
        if next == t {
            if out.len() >= budget {
                return Err(Error::PathBudgetExceeded { budget });
            }
            let mut nodes = stack.clone();
            nodes.push(t);
            out.push(Path::new(net, nodes)?);
            continue;
        }
        if net.is_terminal(next) {
            continue;
        }
        on_path[next] = true;
        stack.push(next);
        extend_paths(net, t, stack, on_path, out, budget)?;
        stack.pop();
        on_path[next] = false;
    }
    Ok(())
}

fn strictly_better(candidate: f64, best: f64) -> bool {
    candidate < best && (best - candidate) > 1e-12 * best
}

/// Most reliable simple s-t path by exhaustive search. Ties go to the
/// lexicographically smallest node sequence.
pub fn exact_best_path(net: &Network) -> Result<(Path, ExactResult)> {
    exact_best_path_with(net, OracleLimits::default())
}

pub fn exact_best_path_with(net: &Network, limits: OracleLimits) -> Result<(Path, ExactResult)> {
    let paths = enumerate_simple_paths(net, limits.path_budget)?;
    let mut best: Option<(Path, ExactResult)> = None;
    for path in paths {
        let result = exact_path_failure_with(net, &path, limits)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| strictly_better(result.probability, b.probability))
        {
            best = Some((path, result));
        }
    }
    best.ok_or(Error::Disconnected)
}

fn interiors_disjoint(net: &Network, a: &Path, b: &Path) -> bool {
    let inner = a.interior(net);
    b.interior(net).iter().all(|v| !inner.contains(v))
}

/// All unordered pairs `(P_i, P_j)`, `i <= j` in lexicographic order, of
/// simple s-t paths. With `require_node_disjoint`, only distinct paths with
/// disjoint interiors are returned.
pub fn enumerate_path_pairs(
    net: &Network,
    require_node_disjoint: bool,
    budget: usize,
) -> Result<Vec<PathPair>> {
    let paths = enumerate_simple_paths(net, budget)?;
    let mut pairs = Vec::new();
    for i in 0..paths.len() {
        let start = if require_node_disjoint { i + 1 } else { i };
        for j in start..paths.len() {
            if require_node_disjoint && !interiors_disjoint(net, &paths[i], &paths[j]) {
                continue;
            }
            if pairs.len() >= budget {
                return Err(Error::PathBudgetExceeded { budget });
            }
            pairs.push(PathPair {
                first: paths[i].clone(),
                second: paths[j].clone(),
                require_node_disjoint,
            });
        }
    }
    Ok(pairs)
}

/// Most reliable pair of s-t paths by exhaustive search.
pub fn exact_best_pair(net: &Network, require_node_disjoint: bool) -> Result<(PathPair, ExactResult)> {
    exact_best_pair_with(net, require_node_disjoint, OracleLimits::default())
}

pub fn exact_best_pair_with(
    net: &Network,
    require_node_disjoint: bool,
    limits: OracleLimits,
) -> Result<(PathPair, ExactResult)> {
    let pairs = enumerate_path_pairs(net, require_node_disjoint, limits.path_budget)?;
    let mut best: Option<(PathPair, ExactResult)> = None;
    for pair in pairs {
        let result = exact_pair_failure_with(net, &pair, limits)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| strictly_better(result.probability, b.probability))
        {
            best = Some((pair, result));
        }
    }
    best.ok_or(Error::NoDisjointPair)
}

/// Largest `d` such that removing any `d` supply nodes leaves at least one
/// path of the pair with every interior node supported.
pub fn exact_resilience(net: &Network, pair: &PathPair) -> Result<usize> {
    exact_resilience_with(net, pair, OracleLimits::default())
}

pub fn exact_resilience_with(net: &Network, pair: &PathPair, limits: OracleLimits) -> Result<usize> {
    let first = node_clauses(net, &pair.first.interior(net));
    let second = node_clauses(net, &pair.second.interior(net));
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let mut universe: Vec<SupplyIdx> = first.iter().chain(&second).flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let n = universe.len();
    let cap = limits.supply_cap.min(MAX_SUPPLY_CAP);
    if n > cap {
        return Err(Error::OracleTooLarge { supplies: n, cap });
    }
    let to_mask = |c: &Vec<SupplyIdx>| {
        c.iter()
            .fold(0u64, |m, u| m | 1 << universe.binary_search(u).unwrap())
    };
    let first: Vec<u64> = first.iter().map(to_mask).collect();
    let second: Vec<u64> = second.iter().map(to_mask).collect();
    let kills = |removed: u64, masks: &[u64]| masks.iter().any(|&m| covers(removed, m));

    for size in 1..=n {
        let mut subset: u64 = (1 << size) - 1;
        let limit = 1u64 << n;
        while subset < limit {
            if kills(subset, &first) && kills(subset, &second) {
                return Ok(size - 1);
            }
            // next subset of the same cardinality
            let low = subset & subset.wrapping_neg();
            let ripple = subset + low;
            subset = (((ripple ^ subset) >> 2) / low) | ripple;
        }
    }
    // removing every supply kills both non-empty interiors
    unreachable!("full supply removal always disconnects both paths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain_network, chain_nodes, dnf_network, ladder_network, random_network, RandomGraphConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain_path(net: &Network) -> Path {
        Path::new(net, chain_nodes(net)).unwrap()
    }

    /// Raw enumeration over every supply touching the clauses, no reduction.
    fn raw_union_failure(net: &Network, clauses: &[Vec<SupplyIdx>]) -> f64 {
        let mut universe: Vec<SupplyIdx> = clauses.iter().flatten().copied().collect();
        universe.sort_unstable();
        universe.dedup();
        let mut total = 0.0;
        for failed in 0u64..1 << universe.len() {
            let is_failed = |u: &SupplyIdx| failed >> universe.binary_search(u).unwrap() & 1 == 1;
            if clauses.iter().any(|c| c.iter().all(is_failed)) {
                total += universe
                    .iter()
                    .map(|u| if is_failed(u) { net.p_fail(*u) } else { 1.0 - net.p_fail(*u) })
                    .product::<f64>();
            }
        }
        total
    }

    #[test]
    fn single_node_single_supply() {
        let net = chain_network(&[&[1]], 0.37);
        let r = exact_path_failure(&net, &chain_path(&net)).unwrap();
        assert_eq!(r.probability, 0.37);
        assert_eq!(r.enumerated_supply_count, 1);
        assert_eq!(r.enumeration_size, 2);
    }

    #[test]
    fn independent_nodes() {
        let p: f64 = 0.1;
        let net = chain_network(&[&[1], &[2], &[3], &[4]], p);
        let r = exact_path_failure(&net, &chain_path(&net)).unwrap();
        assert!((r.probability - (1.0 - (1.0 - p).powi(4))).abs() < 1e-15);
    }

    #[test]
    fn dnf_fixture_is_nine_sixteenths() {
        let net = dnf_network();
        let r = exact_path_failure(&net, &chain_path(&net)).unwrap();
        assert_eq!(r.probability, 9.0 / 16.0);
        assert_eq!(r.enumeration_size, 16);
    }

    #[test]
    fn cap_is_enforced() {
        let sets: Vec<Vec<u32>> = (0..5).map(|i| vec![i]).collect();
        let refs: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
        let net = chain_network(&refs, 0.1);
        let limits = OracleLimits {
            supply_cap: 4,
            ..Default::default()
        };
        assert!(matches!(
            exact_path_failure_with(&net, &chain_path(&net), limits),
            Err(Error::OracleTooLarge { supplies: 5, cap: 4 })
        ));
    }

    #[test]
    fn pair_with_itself_equals_single_path() {
        let net = dnf_network();
        let p = chain_path(&net);
        let pair = PathPair::new(&net, p.clone(), p.clone(), false).unwrap();
        let both = exact_pair_failure(&net, &pair).unwrap().probability;
        let single = exact_path_failure(&net, &p).unwrap().probability;
        assert!((both - single).abs() < 1e-15);
    }

    #[test]
    fn supply_disjoint_pair_is_product() {
        let net = ladder_network(&[&[1, 2], &[3]], &[&[4], &[5, 6]], 0.3);
        let a = Path::parse(&net, "s,a1,a2,t").unwrap();
        let b = Path::parse(&net, "s,b1,b2,t").unwrap();
        let pa = exact_path_failure(&net, &a).unwrap().probability;
        let pb = exact_path_failure(&net, &b).unwrap().probability;
        let both = exact_pair_failure(&net, &PathPair::new(&net, a, b, true).unwrap()).unwrap();
        assert!((both.probability - pa * pb).abs() < 1e-15);
    }

    #[test]
    fn overlapping_single_node_pair() {
        let net = ladder_network(&[&[1, 2]], &[&[2, 3]], 0.1);
        let a = Path::parse(&net, "s,a1,t").unwrap();
        let b = Path::parse(&net, "s,b1,t").unwrap();
        let both = exact_pair_failure(&net, &PathPair::new(&net, a, b, true).unwrap()).unwrap();
        assert!((both.probability - 0.001).abs() < 1e-15);
    }

    #[test]
    fn best_path_between_parallel_candidates() {
        let net = crate::model::Network::from_json(
            r#"{
                "supply_nodes": [{"id": "u1", "p_fail": 0.1}, {"id": "u2", "p_fail": 0.2},
                                 {"id": "u3", "p_fail": 0.3}],
                "demand_nodes": [
                    {"id": "s"}, {"id": "t"},
                    {"id": "a", "supplies": ["u1", "u2"]},
                    {"id": "b", "supplies": ["u3"]}
                ],
                "edges": [["s", "a"], ["a", "t"], ["s", "b"], ["b", "t"]],
                "terminals": {"s": "s", "t": "t"}
            }"#,
        )
        .unwrap();
        let (path, result) = exact_best_path(&net).unwrap();
        assert_eq!(path.display(&net), "s,a,t");
        assert!((result.probability - 0.02).abs() < 1e-15);
    }

    #[test]
    fn best_path_of_single_path_graph() {
        let net = chain_network(&[&[1], &[2, 3]], 0.2);
        let (path, _) = exact_best_path(&net).unwrap();
        assert_eq!(path, chain_path(&net));
    }

    #[test]
    fn best_path_matches_independent_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = RandomGraphConfig {
            interior_nodes: 5,
            supplies: 6,
            ..Default::default()
        };
        for _ in 0..10 {
            let net = random_network(&mut rng, &cfg);
            let (best, result) = exact_best_path(&net).unwrap();
            for path in enumerate_simple_paths(&net, 1000).unwrap() {
                let clauses = node_clauses(&net, &path.interior(&net));
                assert!(raw_union_failure(&net, &clauses) >= result.probability - 1e-12);
            }
            let clauses = node_clauses(&net, &best.interior(&net));
            assert!((raw_union_failure(&net, &clauses) - result.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn best_pair_of_two_disjoint_paths() {
        let net = ladder_network(&[&[1]], &[&[2], &[3]], 0.1);
        let (pair, _) = exact_best_pair(&net, true).unwrap();
        assert_eq!(pair.first.display(&net), "s,a1,t");
        assert_eq!(pair.second.display(&net), "s,b1,b2,t");
        let chain = chain_network(&[&[1]], 0.1);
        assert!(matches!(exact_best_pair(&chain, true), Err(Error::NoDisjointPair)));
    }

    #[test]
    fn resilient_pair_beats_risk_sharing_pair() {
        // Three s-t routes. a and b each hold one node with supplies {1,2};
        // c uses {3,4} and {1,5}. The pair (a, b) dies with {1,2}; pairs with
        // c need three supply failures.
        let net = crate::model::Network::from_json(
            r#"{
                "supply_nodes": [{"id": "u1", "p_fail": 0.1}, {"id": "u2", "p_fail": 0.1},
                                 {"id": "u3", "p_fail": 0.1}, {"id": "u4", "p_fail": 0.1},
                                 {"id": "u5", "p_fail": 0.1}],
                "demand_nodes": [
                    {"id": "s"}, {"id": "t"},
                    {"id": "a", "supplies": ["u1", "u2"]},
                    {"id": "b", "supplies": ["u1", "u2"]},
                    {"id": "c1", "supplies": ["u3", "u4"]},
                    {"id": "c2", "supplies": ["u3", "u5"]}
                ],
                "edges": [["s", "a"], ["a", "t"], ["s", "b"], ["b", "t"],
                          ["s", "c1"], ["c1", "c2"], ["c2", "t"]],
                "terminals": {"s": "s", "t": "t"}
            }"#,
        )
        .unwrap();
        let ab = PathPair::new(
            &net,
            Path::parse(&net, "s,a,t").unwrap(),
            Path::parse(&net, "s,b,t").unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(exact_resilience(&net, &ab).unwrap(), 1);
        let (best, result) = exact_best_pair(&net, true).unwrap();
        assert_eq!(exact_resilience(&net, &best).unwrap(), 3);
        assert!(result.probability < exact_pair_failure(&net, &ab).unwrap().probability);
    }

    #[test]
    fn resilience_examples() {
        let net = ladder_network(&[&[1, 2], &[3, 4]], &[&[1, 2]], 0.1);
        let pair = PathPair::new(
            &net,
            Path::parse(&net, "s,a1,a2,t").unwrap(),
            Path::parse(&net, "s,b1,t").unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(exact_resilience(&net, &pair).unwrap(), 1);

        let net = ladder_network(&[&[1], &[2]], &[&[3], &[4]], 0.1);
        let pair = PathPair::new(
            &net,
            Path::parse(&net, "s,a1,a2,t").unwrap(),
            Path::parse(&net, "s,b1,b2,t").unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(exact_resilience(&net, &pair).unwrap(), 1);

        let net = ladder_network(&[&[1, 2], &[3, 4]], &[&[5, 6], &[7, 8]], 0.1);
        let pair = PathPair::new(
            &net,
            Path::parse(&net, "s,a1,a2,t").unwrap(),
            Path::parse(&net, "s,b1,b2,t").unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(exact_resilience(&net, &pair).unwrap(), 3);
    }

    fn random_pairs() -> Vec<(Network, PathPair)> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = RandomGraphConfig {
            interior_nodes: 6,
            supplies: 7,
            max_supplies_per_node: 3,
            ..Default::default()
        };
        let mut out = Vec::new();
        while out.len() < 30 {
            let net = random_network(&mut rng, &cfg);
            if let Ok(pairs) = enumerate_path_pairs(&net, false, 10_000) {
                if let Some(pair) = pairs.into_iter().nth(out.len() % 5) {
                    out.push((net, pair));
                }
            }
        }
        out
    }

    #[test]
    fn resilience_equals_min_union_minus_one() {
        for (net, pair) in random_pairs() {
            let mut min_union = usize::MAX;
            for &i in &pair.first.interior(&net) {
                for &j in &pair.second.interior(&net) {
                    min_union = min_union.min(union_of(&net.demand(i).supplies, &net.demand(j).supplies).len());
                }
            }
            assert_eq!(exact_resilience(&net, &pair).unwrap(), min_union - 1);
        }
    }

    #[test]
    fn pair_failure_bounded_by_each_path() {
        for (net, pair) in random_pairs() {
            let both = exact_pair_failure(&net, &pair).unwrap().probability;
            let a = exact_path_failure(&net, &pair.first).unwrap().probability;
            let b = exact_path_failure(&net, &pair.second).unwrap().probability;
            assert!(both <= a.min(b) + 1e-15);
            let raw = raw_union_failure(&net, &pair_clauses(&net, &pair));
            assert!((both - raw).abs() < 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn invariant_under_reversal_and_relabeling(
            sets in proptest::collection::vec(proptest::collection::btree_set(1u32..7, 1..4), 1..6),
            p in 0.01f64..0.99,
            shift in 1u32..20,
        ) {
            let sets: Vec<Vec<u32>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            let refs: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
            let net = chain_network(&refs, p);
            let nodes = chain_nodes(&net);
            let forward = exact_path_failure(&net, &Path::new(&net, nodes.clone()).unwrap()).unwrap().probability;
            let mut reversed = nodes;
            reversed.reverse();
            let backward = exact_path_failure(&net, &Path::new(&net, reversed).unwrap()).unwrap().probability;
            proptest::prop_assert!((forward - backward).abs() < 1e-14);

            let relabeled: Vec<Vec<u32>> = sets.iter().map(|s| s.iter().map(|u| (u * 7 + shift) % 101).collect()).collect();
            let refs: Vec<&[u32]> = relabeled.iter().map(Vec::as_slice).collect();
            let net2 = chain_network(&refs, p);
            let other = exact_path_failure(&net2, &Path::new(&net2, chain_nodes(&net2)).unwrap()).unwrap().probability;
            proptest::prop_assert!((forward - other).abs() < 1e-14);
        }

        #[test]
        fn monotone_in_supply_probability(
            sets in proptest::collection::vec(proptest::collection::btree_set(1u32..6, 1..3), 1..5),
            p in 0.01f64..0.9,
            which in 1u32..6,
            bump in 0.0f64..0.1,
        ) {
            let sets: Vec<Vec<u32>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            let refs: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
            let net = chain_network(&refs, p);
            let path = Path::new(&net, chain_nodes(&net)).unwrap();
            let before = exact_path_failure(&net, &path).unwrap().probability;
            let mut doc = net.to_doc();
            for s in &mut doc.supply_nodes {
                if s.id == format!("u{which}") {
                    s.p_fail += bump;
                }
            }
            let raised = Network::from_doc(&doc).unwrap();
            let after = exact_path_failure(&raised, &path).unwrap().probability;
            proptest::prop_assert!(after >= before - 1e-15);
        }
    }
}
