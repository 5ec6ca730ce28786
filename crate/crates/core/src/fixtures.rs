//! Small network builders shared by unit tests, integration tests and the
//! experiment runner.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{DemandDoc, Network, NetworkDoc, NodeIdx, SupplyDoc, TerminalsDoc};

fn supply_doc(id: u32, p: f64) -> SupplyDoc {
    SupplyDoc {
        id: format!("u{id}"),
        p_fail: p,
        x: None,
        y: None,
    }
}

fn demand_doc(id: &str, supplies: &[u32]) -> DemandDoc {
    DemandDoc {
        id: id.to_string(),
        supplies: supplies.iter().map(|u| format!("u{u}")).collect(),
        x: None,
        y: None,
    }
}

fn supply_docs<'a>(sets: impl Iterator<Item = &'a [u32]>, p: f64) -> Vec<SupplyDoc> {
    let mut ids: Vec<u32> = sets.flat_map(|s| s.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter().map(|u| supply_doc(u, p)).collect()
}

/// `s - v1 - ... - vm - t` where `v_i` depends on supplies `u<n>` for each
/// `n` in `sets[i-1]`; every supply fails with probability `p`.
pub fn chain_network(sets: &[&[u32]], p: f64) -> Network {
    let mut demand = vec![demand_doc("s", &[]), demand_doc("t", &[])];
    let mut edges = Vec::new();
    let mut prev = "s".to_string();
    for (i, set) in sets.iter().enumerate() {
        let id = format!("v{}", i + 1);
        demand.push(demand_doc(&id, set));
        edges.push([prev, id.clone()]);
        prev = id;
    }
    edges.push([prev, "t".into()]);
    let doc = NetworkDoc {
        supply_nodes: supply_docs(sets.iter().copied(), p),
        demand_nodes: demand,
        edges,
        terminals: Some(TerminalsDoc {
            s: "s".into(),
            t: "t".into(),
        }),
    };
    Network::from_doc(&doc).expect("chain fixture is valid")
}

/// Node sequence `s, v1, ..., vm, t` of a [`chain_network`].
pub fn chain_nodes(net: &Network) -> Vec<NodeIdx> {
    let (s, t) = net.terminals().unwrap();
    let mut nodes = vec![s];
    let mut i = 1;
    while let Ok(v) = net.node_index(&format!("v{i}")) {
        nodes.push(v);
        i += 1;
    }
    nodes.push(t);
    nodes
}

/// Two parallel chains `s - a1..ak - t` and `s - b1..bl - t`.
pub fn ladder_network(top: &[&[u32]], bottom: &[&[u32]], p: f64) -> Network {
    let mut demand = vec![demand_doc("s", &[]), demand_doc("t", &[])];
    let mut edges = Vec::new();
    for (prefix, sets) in [("a", top), ("b", bottom)] {
        let mut prev = "s".to_string();
        for (i, set) in sets.iter().enumerate() {
            let id = format!("{prefix}{}", i + 1);
            demand.push(demand_doc(&id, set));
            edges.push([prev, id.clone()]);
            prev = id;
        }
        edges.push([prev, "t".into()]);
    }
    let doc = NetworkDoc {
        supply_nodes: supply_docs(top.iter().chain(bottom).copied(), p),
        demand_nodes: demand,
        edges,
        terminals: Some(TerminalsDoc {
            s: "s".into(),
            t: "t".into(),
        }),
    };
    Network::from_doc(&doc).expect("ladder fixture is valid")
}

/// The monotone-DNF path: four nodes with supply sets {1,2}, {2,3}, {1,3},
/// {1,4}, every supply failing with probability 1/2. Its exact failure
/// probability is 9/16.
pub fn dnf_network() -> Network {
    chain_network(&[&[1, 2], &[2, 3], &[1, 3], &[1, 4]], 0.5)
}

/// Knobs for [`random_network`].
#[derive(Debug, Clone)]
pub struct RandomGraphConfig {
    /// Interior (non-terminal) demand nodes.
    pub interior_nodes: usize,
    pub supplies: usize,
    /// Probability of each extra edge beyond the spanning structure.
    pub edge_probability: f64,
    pub min_supplies_per_node: usize,
    pub max_supplies_per_node: usize,
    pub p_range: (f64, f64),
    /// Allow a direct s-t edge.
    pub allow_st_edge: bool,
}

impl Default for RandomGraphConfig {
    fn default() -> Self {
        Self {
            interior_nodes: 8,
            supplies: 8,
            edge_probability: 0.3,
            min_supplies_per_node: 1,
            max_supplies_per_node: 2,
            p_range: (0.05, 0.5),
            allow_st_edge: false,
        }
    }
}

/// Random connected demand graph with terminals `s` and `t`. Interior nodes
/// are named `n00`, `n01`, ...; supplies `u00`, `u01`, ....
pub fn random_network<R: Rng>(rng: &mut R, cfg: &RandomGraphConfig) -> Network {
    let n = cfg.interior_nodes;
    let mut ids: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    ids.push("s".into());
    ids.push("t".into());
    let s = n;
    let t = n + 1;

    let mut edges = std::collections::BTreeSet::new();
    let add = |a: usize, b: usize, edges: &mut std::collections::BTreeSet<(usize, usize)>| {
        if a != b && (cfg.allow_st_edge || (a.min(b), a.max(b)) != (s, t)) {
            edges.insert((a.min(b), a.max(b)));
        }
    };
    // random spanning tree over all nodes
    let mut order: Vec<usize> = (0..n + 2).collect();
    order.shuffle(rng);
    for i in 1..order.len() {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        if (a.min(b), a.max(b)) == (s, t) && !cfg.allow_st_edge {
            // route through an interior node instead
            if n > 0 {
                let mid = rng.gen_range(0..n);
                add(a, mid, &mut edges);
                add(mid, b, &mut edges);
            }
            continue;
        }
        add(a, b, &mut edges);
    }
    for a in 0..n + 2 {
        for b in a + 1..n + 2 {
            if rng.gen_bool(cfg.edge_probability) {
                add(a, b, &mut edges);
            }
        }
    }

    let supply_nodes: Vec<SupplyDoc> = (0..cfg.supplies)
        .map(|u| SupplyDoc {
            id: format!("u{u:02}"),
            p_fail: if cfg.p_range.0 == cfg.p_range.1 {
                cfg.p_range.0
            } else {
                rng.gen_range(cfg.p_range.0..=cfg.p_range.1)
            },
            x: None,
            y: None,
        })
        .collect();
    let all: Vec<usize> = (0..cfg.supplies).collect();
    let demand_nodes = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let supplies = if i >= n {
                Vec::new()
            } else {
                let k = rng.gen_range(cfg.min_supplies_per_node..=cfg.max_supplies_per_node);
                let mut chosen: Vec<usize> = all.choose_multiple(rng, k.min(cfg.supplies)).copied().collect();
                chosen.sort_unstable();
                chosen.into_iter().map(|u| format!("u{u:02}")).collect()
            };
            DemandDoc {
                id: id.clone(),
                supplies,
                x: None,
                y: None,
            }
        })
        .collect();
    let doc = NetworkDoc {
        supply_nodes,
        demand_nodes,
        edges: edges
            .into_iter()
            .map(|(a, b)| [ids[a].clone(), ids[b].clone()])
            .collect(),
        terminals: Some(TerminalsDoc {
            s: "s".into(),
            t: "t".into(),
        }),
    };
    Network::from_doc(&doc).expect("random fixture is valid")
}
