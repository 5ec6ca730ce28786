//! Integer programs for the most reliable path and the most resilient
//! disjoint pair, an exact solver for small instances, and LP export.

mod build;
mod extract;
mod lp;
mod model;
mod solver;

pub use build::{build_max_d, build_min_mbar, build_min_pair_mbar, build_min_weighted, weight_ratio};
pub use extract::{extract_route, Route};
pub use lp::export_lp;
pub use model::{Cmp, FlowSystem, IlpModel, ModelKind, Row, Sense, VarIdx, VarKind, VarRole, Variable};
pub use solver::{solve_exact, solve_exact_tiebreak, IlpSolution, SolveStatus, DEFAULT_BUDGET};

use serde::Serialize;

use crate::error::Result;
use crate::model::{Network, Path, PathPair};
use crate::routing::surrogate_lengths;

/// Surrogate length of the head of every flow arc, 0 for other variables.
fn surrogate_ties(net: &Network, model: &IlpModel) -> Vec<f64> {
    let lengths = surrogate_lengths(net);
    model
        .variables
        .iter()
        .map(|v| match v.role {
            VarRole::Flow { head, .. } => lengths[head],
            _ => 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathOptimum {
    pub status: SolveStatus,
    /// Largest bottleneck; `None` when the path has no interior node.
    pub k: Option<usize>,
    pub m_bar: Option<i128>,
    #[serde(skip)]
    pub path: Option<Path>,
    pub nodes: u64,
}

/// Path with the fewest distinct size-`k` supply sets among paths of the
/// largest bottleneck `k`; ties go to the shortest surrogate length.
pub fn optimal_path(net: &Network, budget: u64) -> Result<PathOptimum> {
    let model = build_min_mbar(net)?;
    let ModelKind::MinMbar { k } = model.kind else {
        unreachable!("min-mbar model")
    };
    let sol = solve_exact_tiebreak(net, &model, budget, Some(&surrogate_ties(net, &model)))?;
    Ok(PathOptimum {
        status: sol.status,
        k,
        m_bar: sol.objective,
        path: match sol.route {
            Some(Route::Path(p)) => Some(p),
            _ => None,
        },
        nodes: sol.nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairOptimum {
    pub status: SolveStatus,
    pub d: Option<i64>,
    pub m_bar: Option<i128>,
    #[serde(skip)]
    pub pair: Option<PathPair>,
    pub nodes: u64,
}

fn pair_of(route: Option<Route>) -> Option<PathPair> {
    match route {
        Some(Route::Pair(p)) => Some(p),
        _ => None,
    }
}

/// Node-disjoint pair maximizing `d`, then minimizing the number of distinct
/// size-`d + 1` cross unions, then minimizing the summed surrogate length.
/// Solved as two programs in sequence sharing one node budget.
pub fn optimal_pair(net: &Network, budget: u64) -> Result<PairOptimum> {
    let first = solve_exact(net, &build_max_d(net)?, budget)?;
    let d = first.objective.map(|d| d as i64);
    if first.status != SolveStatus::Optimal {
        return Ok(PairOptimum {
            status: first.status,
            d,
            m_bar: None,
            pair: pair_of(first.route),
            nodes: first.nodes,
        });
    }
    let d = d.expect("optimal solutions carry an objective");
    let remaining = budget.saturating_sub(first.nodes);
    let model = build_min_pair_mbar(net, d)?;
    let second = solve_exact_tiebreak(net, &model, remaining, Some(&surrogate_ties(net, &model)))?;
    let (status, pair) = match second.status {
        SolveStatus::Optimal => (SolveStatus::Optimal, pair_of(second.route)),
        SolveStatus::BudgetExceeded => (
            SolveStatus::BudgetExceeded,
            pair_of(second.route).or(pair_of(first.route)),
        ),
        SolveStatus::Infeasible => unreachable!("the first-stage pair satisfies the second stage"),
    };
    Ok(PairOptimum {
        status,
        d: Some(d),
        m_bar: second.objective,
        pair,
        nodes: first.nodes + second.nodes,
    })
}
