use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use super::model::{Cmp, FlowSystem, IlpModel, ModelKind, Sense, VarIdx, VarKind, VarRole};
use crate::error::{Error, Result};
use crate::model::{union_of, Network, NodeIdx, SupplyIdx};
use crate::routing::max_capacity_path;

fn reachable(net: &Network, allowed: &[bool], from: NodeIdx, to: NodeIdx) -> bool {
    let mut seen = vec![false; net.demand_count()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            return true;
        }
        for &w in net.neighbors(v) {
            if allowed[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

fn new_model(net: &Network, kind: ModelKind, sense: Sense) -> Result<IlpModel> {
    let (s, t) = net.require_terminals()?;
    let ids = (0..net.demand_count()).map(|v| net.demand(v).id.clone()).collect();
    Ok(IlpModel::new(kind, sense, s, t, ids))
}

/// Adds the arc variables and conservation rows of one path. Both
/// directions of every edge between allowed nodes become arcs, except arcs
/// into the source or out of the sink.
fn add_flow_system(model: &mut IlpModel, net: &Network, allowed: &[bool]) -> usize {
    let (s, t) = (model.source, model.sink);
    let system = model.systems.len();
    let mut arcs: Vec<(NodeIdx, NodeIdx)> = net
        .edges()
        .iter()
        .filter(|&&(a, b)| allowed[a] && allowed[b])
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .filter(|&(tail, head)| head != s && tail != t)
        .collect();
    arcs.sort_unstable();
    let vars: Vec<VarIdx> = arcs
        .iter()
        .map(|&(tail, head)| model.add_var(VarKind::Binary, VarRole::Flow { system, tail, head }))
        .collect();
    for v in (0..net.demand_count()).filter(|&v| allowed[v]) {
        let mut terms: Vec<(VarIdx, i64)> = Vec::new();
        for (&(tail, head), &x) in arcs.iter().zip(&vars) {
            if tail == v {
                terms.push((x, 1));
            } else if head == v {
                terms.push((x, -1));
            }
        }
        terms.sort_unstable();
        let rhs = if v == s {
            1
        } else if v == t {
            -1
        } else {
            0
        };
        model.add_row(terms, Cmp::Eq, rhs);
    }
    model.systems.push(FlowSystem { arcs: vars });
    system
}

/// Arc variables of `system` touching node `v`.
fn incident(model: &IlpModel, system: usize, v: NodeIdx) -> Vec<VarIdx> {
    model.systems[system]
        .arcs
        .iter()
        .copied()
        .filter(|&x| match model.variables[x].role {
            VarRole::Flow { tail, head, .. } => tail == v || head == v,
            _ => false,
        })
        .collect()
}

fn interior(net: &Network) -> Vec<NodeIdx> {
    (0..net.demand_count()).filter(|&v| !net.is_terminal(v)).collect()
}

/// Path minimizing the number of distinct size-`k` supply sets, where `k`
/// is the largest achievable bottleneck. Nodes with fewer than `k` supplies
/// are removed first.
pub fn build_min_mbar(net: &Network) -> Result<IlpModel> {
    let (_, k) = max_capacity_path(net)?;
    let mut model = new_model(net, ModelKind::MinMbar { k }, Sense::Minimize)?;
    let allowed: Vec<bool> = (0..net.demand_count())
        .map(|v| net.is_terminal(v) || k.is_none_or(|k| net.supply_degree(v) >= k))
        .collect();
    if !reachable(net, &allowed, model.source, model.sink) {
        return Err(Error::Disconnected);
    }
    add_flow_system(&mut model, net, &allowed);

    let tight: Vec<NodeIdx> = match k {
        Some(k) => interior(net)
            .into_iter()
            .filter(|&v| net.supply_degree(v) == k)
            .collect(),
        None => Vec::new(),
    };
    let mut sets: BTreeMap<&[SupplyIdx], usize> = BTreeMap::new();
    for &v in &tight {
        sets.insert(net.failure_set(v).unwrap(), 0);
    }
    for (id, (set, slot)) in sets.iter_mut().enumerate() {
        *slot = model.add_var(VarKind::Binary, VarRole::Hit { set: id });
        model.hit_sets.push(set.to_vec());
        model.objective.push((*slot, BigInt::from(1)));
    }
    for &v in &tight {
        let h = sets[net.failure_set(v).unwrap()];
        let mut terms: Vec<(VarIdx, i64)> = incident(&model, 0, v).into_iter().map(|x| (x, 1)).collect();
        terms.push((h, -2));
        model.add_row(terms, Cmp::Le, 0);
    }
    Ok(model)
}

/// Two node-disjoint flows with node-use variables. Returns the model and
/// the `b` variables per system, indexed by node.
fn pair_base(net: &Network, kind: ModelKind, sense: Sense) -> Result<(IlpModel, [Vec<Option<VarIdx>>; 2])> {
    let mut model = new_model(net, kind, sense)?;
    let all = vec![true; net.demand_count()];
    add_flow_system(&mut model, net, &all);
    add_flow_system(&mut model, net, &all);
    let mut uses: [Vec<Option<VarIdx>>; 2] = [vec![None; net.demand_count()], vec![None; net.demand_count()]];
    for (system, slots) in uses.iter_mut().enumerate() {
        for v in interior(net) {
            slots[v] = Some(model.add_var(VarKind::Binary, VarRole::NodeUse { system, node: v }));
        }
    }
    for (system, slots) in uses.iter().enumerate() {
        for v in interior(net) {
            let mut terms: Vec<(VarIdx, i64)> = incident(&model, system, v).into_iter().map(|x| (x, 1)).collect();
            terms.push((slots[v].unwrap(), -2));
            model.add_row(terms, Cmp::Le, 0);
        }
    }
    for v in interior(net) {
        model.add_row(vec![(uses[0][v].unwrap(), 1), (uses[1][v].unwrap(), 1)], Cmp::Le, 1);
    }
    // a direct s-t edge may carry only one of the two paths
    let (s, t) = (model.source, model.sink);
    let direct: Vec<(VarIdx, i64)> = (0..2)
        .filter_map(|system| {
            model.var_index(VarRole::Flow {
                system,
                tail: s,
                head: t,
            })
        })
        .map(|x| (x, 1))
        .collect();
    if direct.len() == 2 {
        model.add_row(direct, Cmp::Le, 1);
    }
    Ok((model, uses))
}

/// Cross unions `S_i ∪ S_j` over ordered pairs of distinct interior nodes.
fn cross_unions(net: &Network) -> Vec<(NodeIdx, NodeIdx, Vec<SupplyIdx>)> {
    let inner = interior(net);
    let mut out = Vec::new();
    for &i in &inner {
        for &j in &inner {
            if i != j {
                out.push((i, j, union_of(&net.demand(i).supplies, &net.demand(j).supplies)));
            }
        }
    }
    out
}

/// Node-disjoint pair maximizing `d`, the smallest cross union size minus
/// one. `d` is capped at the supply count.
pub fn build_max_d(net: &Network) -> Result<IlpModel> {
    let (mut model, uses) = pair_base(net, ModelKind::MaxD, Sense::Maximize)?;
    let unions = cross_unions(net);
    let widest = unions.iter().map(|(_, _, u)| u.len()).max().unwrap_or(0) as i64;
    let big_m = 2 * widest + 1;
    model.big_m = Some(big_m);
    let d = model.add_var(
        VarKind::Integer {
            lo: 0,
            hi: net.supply_count() as i64,
        },
        VarRole::Resilience,
    );
    model.objective.push((d, BigInt::from(1)));
    // d + 1 <= |S_i ∪ S_j| + M (2 - b_i^1 - b_j^2)
    for (i, j, u) in &unions {
        model.add_row(
            vec![(uses[0][*i].unwrap(), big_m), (uses[1][*j].unwrap(), big_m), (d, 1)],
            Cmp::Le,
            u.len() as i64 - 1 + 2 * big_m,
        );
    }
    Ok(model)
}

/// Adds one hit variable per distinct union in `unions` with rows
/// `h >= b_i^1 + b_j^2 - 1`. Returns the hit variable per distinct union.
fn add_union_hits(
    model: &mut IlpModel,
    uses: &[Vec<Option<VarIdx>>; 2],
    unions: &[&(NodeIdx, NodeIdx, Vec<SupplyIdx>)],
) -> BTreeMap<Vec<SupplyIdx>, VarIdx> {
    let mut sets: BTreeMap<Vec<SupplyIdx>, VarIdx> = unions.iter().map(|(_, _, u)| (u.clone(), 0)).collect();
    for (id, (set, slot)) in sets.iter_mut().enumerate() {
        *slot = model.add_var(VarKind::Binary, VarRole::Hit { set: id });
        model.hit_sets.push(set.clone());
    }
    for (i, j, u) in unions {
        model.add_row(
            vec![(uses[0][*i].unwrap(), -1), (uses[1][*j].unwrap(), -1), (sets[u], 1)],
            Cmp::Ge,
            -1,
        );
    }
    sets
}

/// `ceil(|V|^2 / 2)`, the ratio between consecutive weights.
pub fn weight_ratio(net: &Network) -> u64 {
    let v = net.demand_count() as u64;
    (v * v).div_ceil(2)
}

/// Weighted pair model with literal weights `w(l) = r^(lmax - l)`,
/// `r = ceil(|V|^2 / 2)`, over the cross union sizes `l` present.
pub fn build_min_weighted(net: &Network) -> Result<IlpModel> {
    let (mut model, uses) = pair_base(net, ModelKind::MinWeighted, Sense::Minimize)?;
    let unions = cross_unions(net);
    let all: Vec<_> = unions.iter().collect();
    let sets = add_union_hits(&mut model, &uses, &all);
    let widest = unions.iter().map(|(_, _, u)| u.len()).max().unwrap_or(0);
    model.big_m = Some(2 * widest as i64 + 1);
    let ratio = BigInt::from(weight_ratio(net));
    for (_, _, u) in &unions {
        model
            .weights
            .entry(u.len())
            .or_insert_with(|| ratio.pow((widest - u.len()) as u32));
    }
    for (set, &h) in &sets {
        model.objective.push((h, model.weights[&set.len()].clone()));
    }
    Ok(model)
}

/// Second stage of the lexicographic pair optimization: every cross union
/// must exceed `d` elements; minimize the distinct unions of size `d + 1`.
pub fn build_min_pair_mbar(net: &Network, d: i64) -> Result<IlpModel> {
    let (mut model, uses) = pair_base(net, ModelKind::MinPairMbar { d }, Sense::Minimize)?;
    let unions = cross_unions(net);
    for (i, j, u) in &unions {
        if (u.len() as i64) <= d {
            model.add_row(vec![(uses[0][*i].unwrap(), 1), (uses[1][*j].unwrap(), 1)], Cmp::Le, 1);
        }
    }
    let tight: Vec<_> = unions.iter().filter(|(_, _, u)| u.len() as i64 == d + 1).collect();
    let sets = add_union_hits(&mut model, &uses, &tight);
    for &h in sets.values() {
        model.objective.push((h, BigInt::from(1)));
    }
    Ok(model)
}
