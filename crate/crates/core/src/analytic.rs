//! Closed-form reliability indicators, small-p sandwich intervals, and
//! upper/lower bounds on path failure probability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{node_failure_probability, reduce_redundant, union_of, Network, Path, PathPair};

/// Single-path indicators `(n_s^min, m̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathIndicators {
    /// Minimum number of distinct supplies over the interior nodes.
    pub n_s_min: usize,
    /// Nodes left after redundancy reduction that have exactly `n_s_min` supplies.
    pub m_bar: usize,
    /// Number of interior nodes `m`.
    pub interior_len: usize,
    /// Every interior node has the same number of supplies.
    pub uniform_supply_degree: bool,
    /// Sandwich threshold per unit epsilon: the interval is guaranteed for
    /// `p <= epsilon * valid_p_max` (`1/m`, or `2/m̄` when degrees are uniform).
    pub valid_p_max: f64,
}

/// Pair indicators `(d, m̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairIndicators {
    /// Resilience: one less than the smallest cross-pair supply union.
    pub d: usize,
    /// Distinct minimal supply unions of size `d + 1`.
    pub m_bar: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn clamped(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.clamp(0.0, 1.0),
            hi: hi.clamp(0.0, 1.0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    /// `n_d^{n_s}`: cap on `upper / lower`.
    pub ratio_cap: f64,
}

pub fn indicators_single(net: &Network, path: &Path) -> Result<PathIndicators> {
    let interior = path.interior(net);
    if interior.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let degrees: Vec<usize> = interior.iter().map(|&v| net.supply_degree(v)).collect();
    let n_s_min = *degrees.iter().min().unwrap();
    let uniform = degrees.iter().all(|&k| k == n_s_min);
    let m_bar = reduce_redundant(net, path)
        .into_iter()
        .filter(|&v| net.supply_degree(v) == n_s_min)
        .count();
    Ok(PathIndicators {
        n_s_min,
        m_bar,
        interior_len: interior.len(),
        uniform_supply_degree: uniform,
        valid_p_max: if uniform {
            2.0 / m_bar as f64
        } else {
            1.0 / interior.len() as f64
        },
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1)")))
    }
}

fn check_p(p: f64, limit: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p {p} not in [0, 1]")));
    }
    // relative slack so that p == limit survives rounding
    if p > limit * (1.0 + 1e-12) {
        return Err(Error::SandwichPrecondition { p, limit });
    }
    Ok(())
}

/// Interval for the failure probability of a path whose supplies all fail
/// with probability `p`. In the general case the interval is
/// `(1 ± epsilon) m̄ p^k` and requires `p <= epsilon / m`; when every node has
/// the same supply count it tightens to `[(1 - epsilon) m̄ p^k, m̄ p^k]` and
/// requires only `p <= 2 epsilon / m̄`.
pub fn approx_single(ind: &PathIndicators, p: f64, epsilon: f64, m: usize, uniform_ns: bool) -> Result<Interval> {
    check_epsilon(epsilon)?;
    let lead = ind.m_bar as f64 * p.powi(ind.n_s_min as i32);
    if uniform_ns {
        check_p(p, 2.0 * epsilon / ind.m_bar as f64)?;
        Ok(Interval::clamped((1.0 - epsilon) * lead, lead))
    } else {
        check_p(p, epsilon / m as f64)?;
        Ok(Interval::clamped((1.0 - epsilon) * lead, (1.0 + epsilon) * lead))
    }
}

/// `p̃(u) = 1 - (1 - p(u))^{1/n_d(u)}` for every supply, indexed by supply.
/// Supplies that support no demand node keep their probability.
pub fn transform_probabilities(net: &Network) -> Vec<f64> {
    (0..net.supply_count())
        .map(|u| {
            let p = net.p_fail(u);
            match net.supply_load(u) {
                0 | 1 => p,
                n => -((-p).ln_1p() / n as f64).exp_m1(),
            }
        })
        .collect()
}

/// p̃(v): failure probability of `v` under the transformed supplies.
pub fn transformed_node_probability(net: &Network, tilde: &[f64], v: usize) -> f64 {
    match net.failure_set(v) {
        None => 0.0,
        Some(set) => crate::model::probability_product(set.iter().map(|&u| tilde[u]), set.len()),
    }
}

/// `1 - prod(1 - q_i)` accumulated in log-space.
pub(crate) fn independent_union(qs: impl Iterator<Item = f64>) -> f64 {
    let log_survival: f64 = qs.map(|q| (-q).ln_1p()).sum();
    (-log_survival.exp_m1()).clamp(0.0, 1.0)
}

/// Upper bound (independent node failures) and lower bound (independent
/// transformed node failures) on the path failure probability.
pub fn bounds_single(net: &Network, path: &Path) -> Bounds {
    let interior = path.interior(net);
    let tilde = transform_probabilities(net);
    let upper = independent_union(interior.iter().map(|&v| node_failure_probability(net, v)));
    let lower = independent_union(
        interior
            .iter()
            .map(|&v| transformed_node_probability(net, &tilde, v)),
    );
    Bounds {
        lower,
        upper,
        ratio_cap: (net.max_supply_load().max(1) as f64).powi(net.max_supply_degree() as i32),
    }
}

pub fn indicators_pair(net: &Network, pair: &PathPair) -> Result<PairIndicators> {
    let first = pair.first.interior(net);
    let second = pair.second.interior(net);
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let mut unions = Vec::with_capacity(first.len() * second.len());
    for &i in &first {
        for &j in &second {
            unions.push(union_of(&net.demand(i).supplies, &net.demand(j).supplies));
        }
    }
    let smallest = unions.iter().map(Vec::len).min().unwrap();
    // unions of the minimum size cannot strictly contain another union
    let mut minimal: Vec<&Vec<usize>> = unions.iter().filter(|u| u.len() == smallest).collect();
    minimal.sort();
    minimal.dedup();
    Ok(PairIndicators {
        d: smallest - 1,
        m_bar: minimal.len(),
    })
}

/// `(1 ± epsilon) m̄ p^{d+1}`, valid for `p <= epsilon / (m1 m2)`.
pub fn approx_pair(ind: &PairIndicators, p: f64, epsilon: f64, m1: usize, m2: usize) -> Result<Interval> {
    check_epsilon(epsilon)?;
    check_p(p, epsilon / (m1 * m2) as f64)?;
    let lead = ind.m_bar as f64 * p.powi(ind.d as i32 + 1);
    Ok(Interval::clamped((1.0 - epsilon) * lead, (1.0 + epsilon) * lead))
}

/// Slack of `[1-(1-p1)^a][1-(1-p2)^b] - (1-(1-p1 p2)^{ab})`, which is
/// non-negative for `p1, p2 in (0,1)`, `a, b in (0,1]`.
pub fn product_inequality_slack(p1: f64, p2: f64, alpha: f64, beta: f64) -> f64 {
    let lhs = -(alpha * beta * (-(p1 * p2)).ln_1p()).exp_m1();
    let a = -(alpha * (-p1).ln_1p()).exp_m1();
    let b = -(beta * (-p2).ln_1p()).exp_m1();
    a * b - lhs
}
