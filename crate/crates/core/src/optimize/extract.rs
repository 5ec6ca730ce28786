use super::model::{IlpModel, Sense, VarRole};
use super::solver::complete_flows;
use crate::error::{Error, Result};
use crate::model::{Network, NodeIdx, Path, PathPair};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Path(Path),
    Pair(PathPair),
}

/// Walks the arcs of `system` set to 1 from source to sink, dropping any
/// cycle met on the way.
fn flow_path(net: &Network, model: &IlpModel, system: usize, assignment: &[i64]) -> Result<Path> {
    let n = net.demand_count();
    let mut balance = vec![0i64; n];
    let mut out: Vec<Vec<NodeIdx>> = vec![Vec::new(); n];
    for &x in &model.systems[system].arcs {
        let VarRole::Flow { tail, head, .. } = model.variables[x].role else {
            unreachable!("flow systems hold arc variables")
        };
        match assignment[x] {
            0 => {}
            1 => {
                balance[tail] += 1;
                balance[head] -= 1;
                out[tail].push(head);
            }
            other => {
                return Err(Error::InconsistentAssignment(format!(
                    "arc {} carries {other}",
                    model.variables[x].name()
                )))
            }
        }
    }
    for (v, &b) in balance.iter().enumerate() {
        let want = if v == model.source {
            1
        } else if v == model.sink {
            -1
        } else {
            0
        };
        if b != want {
            return Err(Error::InconsistentAssignment(format!(
                "flow {} is not conserved at `{}`",
                system + 1,
                net.demand(v).id
            )));
        }
    }
    for list in &mut out {
        list.reverse();
    }
    let mut nodes = vec![model.source];
    let mut node = model.source;
    while node != model.sink {
        let next = out[node].pop().ok_or_else(|| {
            Error::InconsistentAssignment(format!("flow {} stops at `{}`", system + 1, net.demand(node).id))
        })?;
        if let Some(pos) = nodes.iter().position(|&v| v == next) {
            nodes.truncate(pos + 1);
        } else {
            nodes.push(next);
        }
        node = next;
    }
    Path::new(net, nodes)
}

/// Assignment with the flows of `paths` and every other arc at 0.
fn flows_of(model: &IlpModel, paths: &[&Path]) -> Vec<i64> {
    let mut values = vec![0i64; model.variables.len()];
    for (system, path) in paths.iter().enumerate() {
        for w in path.nodes().windows(2) {
            let role = VarRole::Flow {
                system,
                tail: w[0],
                head: w[1],
            };
            if let Some(x) = model.var_index(role) {
                values[x] = 1;
            }
        }
    }
    values
}

/// Reads the path (one flow system) or node-disjoint pair (two) out of a
/// feasible assignment, then checks that the extracted route, completed
/// optimally, scores no worse than the assignment.
pub fn extract_route(net: &Network, model: &IlpModel, assignment: &[i64]) -> Result<Route> {
    if !model.is_feasible(assignment) {
        return Err(Error::InconsistentAssignment("assignment violates the model".into()));
    }
    let paths = (0..model.systems.len())
        .map(|k| flow_path(net, model, k, assignment))
        .collect::<Result<Vec<_>>>()?;
    let claimed: i128 = model
        .objective_value(assignment)
        .try_into()
        .map_err(|_| Error::InconsistentAssignment("objective out of range".into()))?;
    let refs: Vec<&Path> = paths.iter().collect();
    let recomputed = complete_flows(model, &flows_of(model, &refs))?
        .ok_or_else(|| Error::InconsistentAssignment("extracted route violates the model".into()))?
        .0;
    let worse = match model.sense {
        Sense::Minimize => recomputed > claimed,
        Sense::Maximize => recomputed < claimed,
    };
    if worse {
        return Err(Error::InconsistentAssignment(format!(
            "extracted route scores {recomputed}, assignment {claimed}"
        )));
    }
    let mut paths = paths.into_iter();
    match (paths.next(), paths.next(), paths.next()) {
        (Some(path), None, None) => Ok(Route::Path(path)),
        (Some(a), Some(b), None) => {
            let (first, second) = if a <= b { (a, b) } else { (b, a) };
            Ok(Route::Pair(PathPair::new(net, first, second, true)?))
        }
        _ => Err(Error::InconsistentAssignment(format!(
            "model has {} flow systems",
            model.systems.len()
        ))),
    }
}
