//! Depth-first branch and bound for the routing programs.
//!
//! Flow variables are fixed by growing each path from the source one arc at
//! a time, always extending the shortest unfinished path (children in
//! arc-variable order, every competing arc fixed to 0);
//! once a path reaches the sink its unused arcs are fixed to 0, so flows
//! never carry cycles. The remaining variables are branched in index order.
//! Linear rows propagate bounds after every fixing, and the objective bound
//! is read off the propagated bounds. An optional per-variable tie cost
//! orders assignments of equal objective.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use serde::Serialize;

use super::extract::{extract_route, Route};
use super::model::{Cmp, IlpModel, Sense, VarIdx, VarRole};
use crate::error::{Error, Result};
use crate::model::{Network, NodeIdx};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    pub status: SolveStatus,
    pub objective: Option<i128>,
    pub route: Option<Route>,
    pub assignment: Option<Vec<i64>>,
    /// Branch nodes visited.
    pub nodes: u64,
}

#[derive(Clone)]
struct State {
    lo: Vec<i64>,
    hi: Vec<i64>,
    paths: Vec<Vec<NodeIdx>>,
    done: Vec<bool>,
    cutoff: Option<i128>,
}

struct Search<'a> {
    model: &'a IlpModel,
    cost: Vec<i128>,
    maximize: bool,
    /// Row coefficients widened once.
    terms: Vec<Vec<(VarIdx, i128)>>,
    obj_terms: Vec<(VarIdx, i128)>,
    /// Objective a new incumbent must reach: at least this when maximizing,
    /// at most this when minimizing.
    cutoff: Option<i128>,
    var_rows: Vec<Vec<usize>>,
    /// Single-path minimization only: objective variables forced to 1 when
    /// the path visits each node, with their share of the cost.
    visit_costs: Option<Vec<Vec<(VarIdx, f64)>>>,
    /// Per system and node: outgoing arc variables (ascending) and incoming.
    out_arcs: Vec<Vec<Vec<VarIdx>>>,
    in_arcs: Vec<Vec<Vec<VarIdx>>>,
    budget: u64,
    nodes: u64,
    exceeded: bool,
    incumbent: Option<(i128, Vec<i64>)>,
    /// Nonnegative per-variable cost minimized among equal objectives.
    tie: Option<&'a [f64]>,
    incumbent_tie: f64,
    /// Per system and node: least tie cost to the sink over all arcs.
    tie_to_sink: Vec<Vec<f64>>,
}

#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

fn clamp_i64(x: i128) -> i64 {
    x.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

fn tail(model: &IlpModel, x: VarIdx) -> NodeIdx {
    match model.variables[x].role {
        VarRole::Flow { tail, .. } => tail,
        _ => unreachable!("arc variable"),
    }
}

/// Least cost from every node to `target` along arcs `incoming[v]` into `v`.
fn distances_to(
    target: NodeIdx,
    nodes: usize,
    incoming: &[Vec<VarIdx>],
    cost: impl Fn(VarIdx) -> f64,
    tail: impl Fn(VarIdx) -> NodeIdx,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; nodes];
    dist[target] = 0.0;
    let mut heap = BinaryHeap::from([(Reverse(OrdF64(0.0)), target)]);
    while let Some((Reverse(OrdF64(d)), v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &x in &incoming[v] {
            let u = tail(x);
            if d + cost(x) < dist[u] {
                dist[u] = d + cost(x);
                heap.push((Reverse(OrdF64(dist[u])), u));
            }
        }
    }
    dist
}

/// Rows `sum(x over arcs at v) - c*h <= 0` make a visit to `v` force `h`.
/// When the objective is nonnegative over a single flow, each forced `h`
/// spreads its cost over the nodes forcing it; any path then pays at most
/// the true cost, which makes the cheapest completion a lower bound.
fn visit_costs(model: &IlpModel, cost: &[i128]) -> Option<Vec<Vec<(VarIdx, f64)>>> {
    if model.sense != Sense::Minimize || model.systems.len() != 1 || cost.iter().any(|&c| c < 0) {
        return None;
    }
    let mut forced: Vec<Vec<VarIdx>> = vec![Vec::new(); model.node_ids.len()];
    for row in &model.rows {
        if row.cmp != Cmp::Le || row.rhs != 0 {
            continue;
        }
        let (mut hit, mut node, mut ok) = (None, None::<[NodeIdx; 2]>, true);
        for &(v, a) in &row.terms {
            match model.variables[v].role {
                VarRole::Flow { tail, head, .. } if a > 0 => {
                    node = Some(match node {
                        None => [tail, head],
                        Some(ends) => ends.map(|e| if e == tail || e == head { e } else { usize::MAX }),
                    });
                }
                _ if a < 0 && hit.is_none() && cost[v] > 0 => hit = Some(v),
                _ => ok = false,
            }
        }
        let common = node.and_then(|ends| ends.into_iter().find(|&e| e != usize::MAX));
        if let (true, Some(h), Some(v)) = (ok, hit, common) {
            if v != model.source && v != model.sink && !forced[v].contains(&h) {
                forced[v].push(h);
            }
        }
    }
    let mut mult = vec![0usize; cost.len()];
    forced.iter().flatten().for_each(|&h| mult[h] += 1);
    if mult.iter().all(|&m| m == 0) {
        return None;
    }
    Some(
        forced
            .into_iter()
            .map(|hs| hs.into_iter().map(|h| (h, cost[h] as f64 / mult[h] as f64)).collect())
            .collect(),
    )
}

impl<'a> Search<'a> {
    fn new(model: &'a IlpModel, budget: u64, tie: Option<&'a [f64]>) -> Result<Self> {
        let n = model.variables.len();
        let mut cost = vec![0i128; n];
        for (v, c) in &model.objective {
            let c: i128 = c
                .try_into()
                .map_err(|_| Error::InvalidParameter(format!("objective coefficient {c} exceeds the solver range")))?;
            cost[*v] += c;
        }
        let mut var_rows = vec![Vec::new(); n];
        for (r, row) in model.rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                if var_rows[v].last() != Some(&r) {
                    var_rows[v].push(r);
                }
            }
        }
        let obj_terms: Vec<(VarIdx, i128)> =
            (0..n).filter(|&v| cost[v] != 0).map(|v| (v, cost[v])).collect();
        for &(v, _) in &obj_terms {
            var_rows[v].push(model.rows.len());
        }
        let terms = model
            .rows
            .iter()
            .map(|row| row.terms.iter().map(|&(v, a)| (v, a as i128)).collect())
            .collect();
        let nodes = model.node_ids.len();
        let mut out_arcs = vec![vec![Vec::new(); nodes]; model.systems.len()];
        let mut in_arcs = vec![vec![Vec::new(); nodes]; model.systems.len()];
        for (system, flow) in model.systems.iter().enumerate() {
            for &x in &flow.arcs {
                if let VarRole::Flow { tail, head, .. } = model.variables[x].role {
                    out_arcs[system][tail].push(x);
                    in_arcs[system][head].push(x);
                }
            }
        }
        let visit_costs = visit_costs(model, &cost);
        let tie_to_sink = match tie {
            Some(tie) => (0..model.systems.len())
                .map(|k| distances_to(model.sink, nodes, &in_arcs[k], |x| tie[x], |x| tail(model, x)))
                .collect(),
            None => Vec::new(),
        };
        Ok(Self {
            model,
            cost,
            maximize: model.sense == Sense::Maximize,
            terms,
            obj_terms,
            cutoff: None,
            var_rows,
            visit_costs,
            out_arcs,
            in_arcs,
            budget,
            nodes: 0,
            exceeded: false,
            incumbent: None,
            tie,
            incumbent_tie: f64::INFINITY,
            tie_to_sink,
        })
    }

    fn head(&self, x: VarIdx) -> NodeIdx {
        match self.model.variables[x].role {
            VarRole::Flow { head, .. } => head,
            _ => unreachable!("arc variable"),
        }
    }

    /// Terms, sense and right-hand side of row `r`; the row past the model
    /// rows is the objective cutoff.
    fn row(&self, r: usize) -> Option<RowView<'_>> {
        if r < self.terms.len() {
            let row = &self.model.rows[r];
            return Some((&self.terms[r], row.cmp, row.rhs as i128));
        }
        let cutoff = self.cutoff?;
        let cmp = if self.maximize { Cmp::Ge } else { Cmp::Le };
        Some((&self.obj_terms, cmp, cutoff))
    }

    /// Tightens bounds through the rows in `queue` until a fixpoint.
    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.terms.len() + 1];
        for &r in &queue {
            queued[r] = true;
        }
        let contribution = |v: VarIdx, a: i128, st: &State| {
            let (x, y) = (a.saturating_mul(st.lo[v] as i128), a.saturating_mul(st.hi[v] as i128));
            (x.min(y), x.max(y))
        };
        while let Some(r) = queue.pop() {
            queued[r] = false;
            let Some((terms, cmp, rhs)) = self.row(r) else {
                continue;
            };
            let (mut min_act, mut max_act) = (0i128, 0i128);
            for &(v, a) in terms {
                let (lo, hi) = contribution(v, a, st);
                min_act = min_act.saturating_add(lo);
                max_act = max_act.saturating_add(hi);
            }
            let upper = matches!(cmp, Cmp::Le | Cmp::Eq);
            let lower = matches!(cmp, Cmp::Ge | Cmp::Eq);
            if (upper && min_act > rhs) || (lower && max_act < rhs) {
                return false;
            }
            for &(v, a) in terms {
                let (cmin, cmax) = contribution(v, a, st);
                let (mut lo, mut hi) = (st.lo[v] as i128, st.hi[v] as i128);
                if upper {
                    let slack = rhs - (min_act - cmin);
                    if a > 0 {
                        hi = hi.min(floor_div(slack, a));
                    } else {
                        lo = lo.max(ceil_div(slack, a));
                    }
                }
                if lower {
                    let need = rhs - (max_act - cmax);
                    if a > 0 {
                        lo = lo.max(ceil_div(need, a));
                    } else {
                        hi = hi.min(floor_div(need, a));
                    }
                }
                if lo > hi {
                    return false;
                }
                let (lo, hi) = (clamp_i64(lo), clamp_i64(hi));
                if lo != st.lo[v] || hi != st.hi[v] {
                    st.lo[v] = lo;
                    st.hi[v] = hi;
                    for &r2 in &self.var_rows[v] {
                        if !queued[r2] {
                            queued[r2] = true;
                            queue.push(r2);
                        }
                    }
                }
            }
        }
        true
    }

    /// Whether every unfinished path can still reach the sink over open arcs
    /// and unvisited nodes.
    fn sink_reachable(&self, st: &State) -> bool {
        let sink = self.model.sink;
        (0..st.done.len()).filter(|&k| !st.done[k]).all(|k| {
            let mut seen = vec![false; self.model.node_ids.len()];
            for &v in &st.paths[k] {
                seen[v] = true;
            }
            let mut stack = vec![*st.paths[k].last().unwrap()];
            while let Some(u) = stack.pop() {
                if u == sink {
                    return true;
                }
                for &x in &self.out_arcs[k][u] {
                    let h = self.head(x);
                    if st.hi[x] > 0 && !seen[h] {
                        seen[h] = true;
                        stack.push(h);
                    }
                }
            }
            false
        })
    }

    /// Fixes `v` to `[lo, hi]` and propagates.
    fn fix(&self, st: &mut State, fixes: &[(VarIdx, i64, i64)]) -> bool {
        let mut queue = Vec::new();
        for &(v, lo, hi) in fixes {
            let (lo, hi) = (lo.max(st.lo[v]), hi.min(st.hi[v]));
            if lo > hi {
                return false;
            }
            if lo != st.lo[v] || hi != st.hi[v] {
                st.lo[v] = lo;
                st.hi[v] = hi;
                queue.extend(&self.var_rows[v]);
            }
        }
        queue.sort_unstable();
        queue.dedup();
        self.propagate(st, queue)
    }

    /// Best objective value still reachable from `st`.
    fn bound(&self, st: &State) -> i128 {
        self.cost
            .iter()
            .enumerate()
            .map(|(v, &c)| {
                let (lo, hi) = (c * st.lo[v] as i128, c * st.hi[v] as i128);
                if self.maximize {
                    lo.max(hi)
                } else {
                    lo.min(hi)
                }
            })
            .sum()
    }

    /// Cheapest way to finish path `system` when arc `x` into `head` costs
    /// `step(x, head)`, or `None` when the sink is out of reach.
    fn cheapest_completion(&self, st: &State, system: usize, step: impl Fn(VarIdx, NodeIdx) -> f64) -> Option<f64> {
        let path = &st.paths[system];
        let mut closed = vec![false; self.model.node_ids.len()];
        for &v in path {
            closed[v] = true;
        }
        let start = *path.last().unwrap();
        closed[start] = false;
        let mut dist = vec![f64::INFINITY; closed.len()];
        dist[start] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push((Reverse(OrdF64(0.0)), start));
        while let Some((Reverse(OrdF64(d)), u)) = heap.pop() {
            if closed[u] {
                continue;
            }
            closed[u] = true;
            if u == self.model.sink {
                return Some(d);
            }
            for &x in &self.out_arcs[system][u] {
                let h = self.head(x);
                if st.hi[x] == 0 || closed[h] {
                    continue;
                }
                let next = d + step(x, h);
                if next < dist[h] {
                    dist[h] = next;
                    heap.push((Reverse(OrdF64(next)), h));
                }
            }
        }
        None
    }

    /// Lower bound on the tie cost of any completion of `st`.
    fn tie_bound(&self, st: &State, tie: &[f64]) -> f64 {
        let committed: f64 = (0..st.lo.len()).map(|v| tie[v] * st.lo[v] as f64).sum();
        (0..st.done.len())
            .filter(|&k| !st.done[k])
            .map(|k| self.cheapest_completion(st, k, |x, _| tie[x]).unwrap_or(f64::INFINITY))
            .fold(committed, |acc, c| acc + c)
    }

    /// Whether a completion of `st` whose objective is at best `primary` can
    /// replace the incumbent.
    fn improves(&self, st: &State, primary: i128) -> bool {
        let Some((best, _)) = &self.incumbent else {
            return true;
        };
        if primary != *best {
            return if self.maximize { primary > *best } else { primary < *best };
        }
        self.tie.is_some_and(|tie| self.tie_bound(st, tie) < self.incumbent_tie)
    }

    fn dfs(&mut self, mut st: State) {
        if self.exceeded {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exceeded = true;
            return;
        }
        if !self.improves(&st, self.bound(&st)) {
            return;
        }
        if st.cutoff != self.cutoff {
            st.cutoff = self.cutoff;
            if !self.propagate(&mut st, vec![self.terms.len()]) {
                return;
            }
        }
        if !self.sink_reachable(&st) {
            return;
        }
        if let (Some(costs), Some(_), Some(false)) = (&self.visit_costs, &self.incumbent, st.done.first()) {
            let step = |_: VarIdx, h: NodeIdx| -> f64 {
                costs[h].iter().filter(|&&(v, _)| st.lo[v] == 0).map(|&(_, c)| c).sum()
            };
            let Some(extra) = self.cheapest_completion(&st, 0, step) else {
                return;
            };
            // shares are fractions of integers; the margin absorbs rounding
            let extra = (extra * (1.0 - 1e-12)).ceil() as i128;
            if !self.improves(&st, self.bound(&st) + extra) {
                return;
            }
        }
        let open = (0..st.done.len()).filter(|&k| !st.done[k]);
        if let Some(system) = open.min_by_key(|&k| st.paths[k].len()) {
            self.extend_path(st, system);
            return;
        }
        let Some(v) = (0..st.lo.len()).find(|&v| st.lo[v] < st.hi[v]) else {
            let value = self.bound(&st);
            let slack = match (self.tie.is_some(), self.maximize) {
                (true, _) => 0,
                (false, true) => 1,
                (false, false) => -1,
            };
            self.cutoff = Some(value + slack);
            if let Some(tie) = self.tie {
                self.incumbent_tie = (0..st.lo.len()).map(|v| tie[v] * st.lo[v] as f64).sum();
            }
            self.incumbent = Some((value, st.lo));
            return;
        };
        let favour_high = if self.maximize {
            self.cost[v] > 0
        } else {
            self.cost[v] < 0
        };
        let values: Vec<i64> = if favour_high {
            (st.lo[v]..=st.hi[v]).rev().collect()
        } else {
            (st.lo[v]..=st.hi[v]).collect()
        };
        for value in values {
            let mut child = st.clone();
            if self.fix(&mut child, &[(v, value, value)]) {
                self.dfs(child);
            }
            if self.exceeded {
                return;
            }
        }
    }

    fn extend_path(&mut self, st: State, system: usize) {
        let end = *st.paths[system].last().unwrap();
        if end == self.model.sink {
            let mut child = st;
            let unused: Vec<(VarIdx, i64, i64)> = self.model.systems[system]
                .arcs
                .iter()
                .filter(|&&x| child.lo[x] == 0)
                .map(|&x| (x, 0, 0))
                .collect();
            child.done[system] = true;
            if self.fix(&mut child, &unused) {
                self.dfs(child);
            }
            return;
        }
        let mut outgoing = self.out_arcs[system][end].clone();
        if let Some(tie) = self.tie {
            let dist = &self.tie_to_sink[system];
            outgoing.sort_by(|&a, &b| (tie[a] + dist[self.head(a)]).total_cmp(&(tie[b] + dist[self.head(b)])));
        }
        for &x in &outgoing {
            if st.hi[x] == 0 {
                continue;
            }
            let head = self.head(x);
            if st.paths[system].contains(&head) {
                continue;
            }
            let mut fixes: Vec<(VarIdx, i64, i64)> = vec![(x, 1, 1)];
            fixes.extend(outgoing.iter().filter(|&&y| y != x).map(|&y| (y, 0, 0)));
            fixes.extend(self.in_arcs[system][head].iter().filter(|&&y| y != x).map(|&y| (y, 0, 0)));
            let mut child = st.clone();
            if self.fix(&mut child, &fixes) {
                child.paths[system].push(head);
                self.dfs(child);
            }
            if self.exceeded {
                return;
            }
        }
    }

    fn root(&self) -> Option<State> {
        let (lo, hi) = self.model.variables.iter().map(|v| v.bounds()).unzip();
        let systems = self.model.systems.len();
        let mut st = State {
            lo,
            hi,
            paths: vec![vec![self.model.source]; systems],
            done: vec![false; systems],
            cutoff: None,
        };
        self.propagate(&mut st, (0..self.model.rows.len()).collect())
            .then_some(st)
    }
}

type RowView<'r> = (&'r [(VarIdx, i128)], Cmp, i128);

type RunResult = (SolveStatus, Option<(i128, Vec<i64>)>, u64);

fn run(model: &IlpModel, budget: u64, fixed_flows: Option<&[i64]>, tie: Option<&[f64]>) -> Result<RunResult> {
    let mut search = Search::new(model, budget, tie)?;
    let Some(mut root) = search.root() else {
        return Ok((SolveStatus::Infeasible, None, 0));
    };
    if let Some(values) = fixed_flows {
        let fixes: Vec<(VarIdx, i64, i64)> = model
            .systems
            .iter()
            .flat_map(|s| s.arcs.iter())
            .map(|&x| (x, values[x], values[x]))
            .collect();
        root.done.iter_mut().for_each(|d| *d = true);
        if !search.fix(&mut root, &fixes) {
            return Ok((SolveStatus::Infeasible, None, 0));
        }
    }
    search.dfs(root);
    let status = match (&search.incumbent, search.exceeded) {
        (_, true) => SolveStatus::BudgetExceeded,
        (Some(_), false) => SolveStatus::Optimal,
        (None, false) => SolveStatus::Infeasible,
    };
    Ok((status, search.incumbent, search.nodes))
}

/// Best objective over assignments sharing the flow values of `assignment`.
pub(crate) fn complete_flows(model: &IlpModel, assignment: &[i64]) -> Result<Option<(i128, Vec<i64>)>> {
    let (status, best, _) = run(model, DEFAULT_BUDGET, Some(assignment), None)?;
    match status {
        SolveStatus::Optimal => Ok(best),
        SolveStatus::Infeasible => Ok(None),
        SolveStatus::BudgetExceeded => Err(Error::BudgetExceeded { budget: DEFAULT_BUDGET }),
    }
}

/// Solves `model` exactly within `budget` branch nodes and extracts the
/// route of the best assignment found.
pub fn solve_exact(net: &Network, model: &IlpModel, budget: u64) -> Result<IlpSolution> {
    solve_exact_tiebreak(net, model, budget, None)
}

/// [`solve_exact`], preferring among optimal assignments the one of least
/// total `tie` cost (one nonnegative entry per variable).
pub fn solve_exact_tiebreak(net: &Network, model: &IlpModel, budget: u64, tie: Option<&[f64]>) -> Result<IlpSolution> {
    if let Some(tie) = tie {
        if tie.len() != model.variables.len() || tie.iter().any(|&c| c.is_nan() || c < 0.0) {
            return Err(Error::InvalidParameter("tie costs must be one nonnegative value per variable".into()));
        }
    }
    let (status, best, nodes) = run(model, budget, None, tie)?;
    let (objective, route, assignment) = match best {
        Some((value, assignment)) => {
            debug_assert!(model.is_feasible(&assignment));
            debug_assert_eq!(model.objective_value(&assignment), BigInt::from(value));
            let route = extract_route(net, model, &assignment)?;
            (Some(value), Some(route), Some(assignment))
        }
        None => (None, None, None),
    };
    Ok(IlpSolution {
        status,
        objective,
        route,
        assignment,
        nodes,
    })
}
