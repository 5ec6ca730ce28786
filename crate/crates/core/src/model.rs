//! Interdependent-network data model.
//!
//! A [`Network`] couples a demand graph (the routed network) with a set of
//! supply nodes. Every demand node lists the supply nodes it depends on and
//! fails exactly when all of them fail; supply nodes fail independently.
//! The designated terminals `s` and `t` never fail.
//!
//! Demand and supply nodes are stored sorted by id, so index order is the
//! lexicographic id order used for every deterministic tie-break.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a demand node inside a [`Network`].
pub type NodeIdx = usize;
/// Index of a supply node inside a [`Network`].
pub type SupplyIdx = usize;

/// Above this many factors, probability products are accumulated in log-space.
pub(crate) const LOG_SPACE_FACTORS: usize = 30;

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyDoc {
    pub id: String,
    pub p_fail: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandDoc {
    pub id: String,
    #[serde(default)]
    pub supplies: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalsDoc {
    pub s: String,
    pub t: String,
}

/// The JSON network document, exactly as read from or written to disk.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub supply_nodes: Vec<SupplyDoc>,
    pub demand_nodes: Vec<DemandDoc>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<TerminalsDoc>,
}

impl NetworkDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// A single broken invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

impl Violation {
    fn new(element: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

/// Checks every invariant of the network document. An empty result means the
/// document can be loaded with [`Network::from_doc`].
pub fn validate_network(doc: &NetworkDoc) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut supply_ids = HashSet::new();
    for supply in &doc.supply_nodes {
        if !supply_ids.insert(supply.id.as_str()) {
            violations.push(Violation::new(&supply.id, "duplicate supply node id"));
        }
        if !(0.0..=1.0).contains(&supply.p_fail) {
            violations.push(Violation::new(
                &supply.id,
                format!("p_fail {} outside [0, 1]", supply.p_fail),
            ));
        }
    }

    let terminal_ids: HashSet<&str> = doc
        .terminals
        .iter()
        .flat_map(|t| [t.s.as_str(), t.t.as_str()])
        .collect();

    let mut demand_ids = HashSet::new();
    for demand in &doc.demand_nodes {
        if !demand_ids.insert(demand.id.as_str()) {
            violations.push(Violation::new(&demand.id, "duplicate demand node id"));
        }
        for supply in &demand.supplies {
            if !supply_ids.contains(supply.as_str()) {
                violations.push(Violation::new(
                    supply,
                    format!("unknown supply node referenced by `{}`", demand.id),
                ));
            }
        }
        if demand.supplies.is_empty() && !terminal_ids.contains(demand.id.as_str()) {
            violations.push(Violation::new(
                &demand.id,
                "non-terminal demand node has no supply nodes",
            ));
        }
    }

    for [a, b] in &doc.edges {
        for end in [a, b] {
            if !demand_ids.contains(end.as_str()) {
                violations.push(Violation::new(
                    end,
                    format!("edge ({a}, {b}) references a missing demand node"),
                ));
            }
        }
        if a == b {
            violations.push(Violation::new(a, "self-loop edge"));
        }
    }

    if let Some(terminals) = &doc.terminals {
        for end in [&terminals.s, &terminals.t] {
            if !demand_ids.contains(end.as_str()) {
                violations.push(Violation::new(end, "terminal is not a demand node"));
            }
        }
        if terminals.s == terminals.t {
            violations.push(Violation::new(&terminals.s, "terminals s and t coincide"));
        }
    }

    violations
}

// ---------------------------------------------------------------------------
// Loaded network

#[derive(Debug, Clone, PartialEq)]
pub struct SupplyNode {
    pub id: String,
    pub p_fail: f64,
    pub coord: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandNode {
    pub id: String,
    /// Sorted, duplicate-free supply indices (the supply set `S_i`).
    pub supplies: Vec<SupplyIdx>,
    pub coord: Option<(f64, f64)>,
}

/// Immutable interdependent network.
#[derive(Debug, Clone)]
pub struct Network {
    supplies: Vec<SupplyNode>,
    demands: Vec<DemandNode>,
    adjacency: Vec<Vec<NodeIdx>>,
    edges: Vec<(NodeIdx, NodeIdx)>,
    terminals: Option<(NodeIdx, NodeIdx)>,
    demand_lookup: HashMap<String, NodeIdx>,
    supply_lookup: HashMap<String, SupplyIdx>,
    /// n_d(u): number of non-terminal demand nodes depending on each supply.
    supply_load: Vec<usize>,
}

fn coord(x: Option<f64>, y: Option<f64>) -> Option<(f64, f64)> {
    x.zip(y)
}

impl Network {
    pub fn from_doc(doc: &NetworkDoc) -> Result<Self> {
        let violations = validate_network(doc);
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }

        let mut supply_docs: Vec<&SupplyDoc> = doc.supply_nodes.iter().collect();
        supply_docs.sort_by(|a, b| a.id.cmp(&b.id));
        let supply_lookup: HashMap<String, SupplyIdx> = supply_docs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        let supplies: Vec<SupplyNode> = supply_docs
            .iter()
            .map(|s| SupplyNode {
                id: s.id.clone(),
                p_fail: s.p_fail,
                coord: coord(s.x, s.y),
            })
            .collect();

        let mut demand_docs: Vec<&DemandDoc> = doc.demand_nodes.iter().collect();
        demand_docs.sort_by(|a, b| a.id.cmp(&b.id));
        let demand_lookup: HashMap<String, NodeIdx> = demand_docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.clone(), i))
            .collect();
        let demands: Vec<DemandNode> = demand_docs
            .iter()
            .map(|d| {
                let set: BTreeSet<SupplyIdx> =
                    d.supplies.iter().map(|s| supply_lookup[s.as_str()]).collect();
                DemandNode {
                    id: d.id.clone(),
                    supplies: set.into_iter().collect(),
                    coord: coord(d.x, d.y),
                }
            })
            .collect();

        let mut edge_set = BTreeSet::new();
        for [a, b] in &doc.edges {
            let (a, b) = (demand_lookup[a.as_str()], demand_lookup[b.as_str()]);
            edge_set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<(NodeIdx, NodeIdx)> = edge_set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); demands.len()];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let terminals = doc.terminals.as_ref().map(|t| {
            (
                demand_lookup[t.s.as_str()],
                demand_lookup[t.t.as_str()],
            )
        });

        let mut supply_load = vec![0; supplies.len()];
        for (i, demand) in demands.iter().enumerate() {
            if terminals.is_some_and(|(s, t)| i == s || i == t) {
                continue;
            }
            for &u in &demand.supplies {
                supply_load[u] += 1;
            }
        }

        Ok(Self {
            supplies,
            demands,
            adjacency,
            edges,
            terminals,
            demand_lookup,
            supply_lookup,
            supply_load,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&NetworkDoc::from_json(text)?)
    }

    /// Serializes back to the document form, in index (sorted id) order.
    pub fn to_doc(&self) -> NetworkDoc {
        NetworkDoc {
            supply_nodes: self
                .supplies
                .iter()
                .map(|s| SupplyDoc {
                    id: s.id.clone(),
                    p_fail: s.p_fail,
                    x: s.coord.map(|c| c.0),
                    y: s.coord.map(|c| c.1),
                })
                .collect(),
            demand_nodes: self
                .demands
                .iter()
                .map(|d| DemandDoc {
                    id: d.id.clone(),
                    supplies: d.supplies.iter().map(|&u| self.supplies[u].id.clone()).collect(),
                    x: d.coord.map(|c| c.0),
                    y: d.coord.map(|c| c.1),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.demands[a].id.clone(), self.demands[b].id.clone()])
                .collect(),
            terminals: self.terminals.map(|(s, t)| TerminalsDoc {
                s: self.demands[s].id.clone(),
                t: self.demands[t].id.clone(),
            }),
        }
    }

    pub fn demand_count(&self) -> usize {
        self.demands.len()
    }

    pub fn supply_count(&self) -> usize {
        self.supplies.len()
    }

    pub fn demand(&self, v: NodeIdx) -> &DemandNode {
        &self.demands[v]
    }

    pub fn demands(&self) -> &[DemandNode] {
        &self.demands
    }

    pub fn supply(&self, u: SupplyIdx) -> &SupplyNode {
        &self.supplies[u]
    }

    pub fn supplies(&self) -> &[SupplyNode] {
        &self.supplies
    }

    pub fn p_fail(&self, u: SupplyIdx) -> f64 {
        self.supplies[u].p_fail
    }

    pub fn node_index(&self, id: &str) -> Result<NodeIdx> {
        self.demand_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn supply_index(&self, id: &str) -> Option<SupplyIdx> {
        self.supply_lookup.get(id).copied()
    }

    pub fn neighbors(&self, v: NodeIdx) -> &[NodeIdx] {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, a: NodeIdx, b: NodeIdx) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(NodeIdx, NodeIdx)] {
        &self.edges
    }

    pub fn terminals(&self) -> Option<(NodeIdx, NodeIdx)> {
        self.terminals
    }

    pub fn require_terminals(&self) -> Result<(NodeIdx, NodeIdx)> {
        self.terminals.ok_or(Error::NoTerminals)
    }

    pub fn is_terminal(&self, v: NodeIdx) -> bool {
        self.terminals.is_some_and(|(s, t)| v == s || v == t)
    }

    /// Supply set of `v`, or `None` for terminals (which never fail).
    pub fn failure_set(&self, v: NodeIdx) -> Option<&[SupplyIdx]> {
        if self.is_terminal(v) {
            None
        } else {
            Some(&self.demands[v].supplies)
        }
    }

    /// n_s(v): number of distinct supplies of `v`.
    pub fn supply_degree(&self, v: NodeIdx) -> usize {
        self.demands[v].supplies.len()
    }

    /// n_d(u): number of non-terminal demand nodes supported by `u`.
    pub fn supply_load(&self, u: SupplyIdx) -> usize {
        self.supply_load[u]
    }

    /// n_d: maximum number of demand nodes a supply node supports.
    pub fn max_supply_load(&self) -> usize {
        self.supply_load.iter().copied().max().unwrap_or(0)
    }

    /// n_s: maximum number of supply nodes of a non-terminal demand node.
    pub fn max_supply_degree(&self) -> usize {
        (0..self.demands.len())
            .filter(|&v| !self.is_terminal(v))
            .map(|v| self.supply_degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn ids(&self, nodes: &[NodeIdx]) -> Vec<String> {
        nodes.iter().map(|&v| self.demands[v].id.clone()).collect()
    }

    /// Copy of the network with every supply failure probability replaced.
    pub fn with_uniform_p(&self, p: f64) -> Self {
        let mut net = self.clone();
        for s in &mut net.supplies {
            s.p_fail = p;
        }
        net
    }
}

/// p(v): probability that demand node `v` fails, the product of its
/// supplies' failure probabilities. Terminals never fail.
pub fn node_failure_probability(net: &Network, v: NodeIdx) -> f64 {
    match net.failure_set(v) {
        None => 0.0,
        Some(set) => probability_product(set.iter().map(|&u| net.p_fail(u)), set.len()),
    }
}

pub(crate) fn probability_product(factors: impl Iterator<Item = f64>, len: usize) -> f64 {
    if len > LOG_SPACE_FACTORS {
        let mut log_sum = 0.0;
        for p in factors {
            if p == 0.0 {
                return 0.0;
            }
            log_sum += p.ln();
        }
        log_sum.exp()
    } else {
        factors.product()
    }
}

/// `true` when sorted slice `a` is a subset of sorted slice `b`.
pub(crate) fn is_subset(a: &[SupplyIdx], b: &[SupplyIdx]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut rest = b.iter();
    'outer: for x in a {
        for y in rest.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

pub(crate) fn union_of(a: &[SupplyIdx], b: &[SupplyIdx]) -> Vec<SupplyIdx> {
    let mut out: Vec<SupplyIdx> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Paths

/// A simple path in the demand graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    nodes: Vec<NodeIdx>,
}

impl Path {
    pub fn new(net: &Network, nodes: Vec<NodeIdx>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidPath("path has no nodes".into()));
        }
        let mut seen = HashSet::new();
        for &v in &nodes {
            if v >= net.demand_count() {
                return Err(Error::InvalidPath(format!("node index {v} out of range")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidPath(format!(
                    "node `{}` visited twice",
                    net.demand(v).id
                )));
            }
        }
        for pair in nodes.windows(2) {
            if !net.is_adjacent(pair[0], pair[1]) {
                return Err(Error::InvalidPath(format!(
                    "`{}` and `{}` are not adjacent",
                    net.demand(pair[0]).id,
                    net.demand(pair[1]).id
                )));
            }
        }
        Ok(Self { nodes })
    }

    pub fn from_ids<S: AsRef<str>>(net: &Network, ids: &[S]) -> Result<Self> {
        let nodes = ids
            .iter()
            .map(|id| net.node_index(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(net, nodes)
    }

    /// Parses a comma-separated list of node ids.
    pub fn parse(net: &Network, text: &str) -> Result<Self> {
        let ids: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        Self::from_ids(net, &ids)
    }

    pub fn nodes(&self) -> &[NodeIdx] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The failure-prone nodes of the path: every node except the terminals.
    pub fn interior(&self, net: &Network) -> Vec<NodeIdx> {
        self.nodes
            .iter()
            .copied()
            .filter(|&v| !net.is_terminal(v))
            .collect()
    }

    pub fn ids(&self, net: &Network) -> Vec<String> {
        net.ids(&self.nodes)
    }

    pub fn display(&self, net: &Network) -> String {
        self.ids(net).join(",")
    }
}

/// Two paths with common endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPair {
    pub first: Path,
    pub second: Path,
    pub require_node_disjoint: bool,
}

impl PathPair {
    pub fn new(net: &Network, first: Path, second: Path, require_node_disjoint: bool) -> Result<Self> {
        let ends = |p: &Path| (p.nodes[0], *p.nodes.last().unwrap());
        if ends(&first) != ends(&second) {
            return Err(Error::InvalidPath("paths of a pair must share both endpoints".into()));
        }
        if require_node_disjoint {
            if first == second {
                return Err(Error::InvalidPath("disjoint pair uses the same path twice".into()));
            }
            let (a, b) = ends(&first);
            let inner: HashSet<NodeIdx> = first.nodes.iter().copied().filter(|&v| v != a && v != b).collect();
            if let Some(&v) = second.nodes.iter().find(|&&v| v != a && v != b && inner.contains(&v)) {
                return Err(Error::InvalidPath(format!(
                    "paths share interior node `{}`",
                    net.demand(v).id
                )));
            }
        }
        Ok(Self {
            first,
            second,
            require_node_disjoint,
        })
    }
}

/// Drops redundant interior nodes: scanning in path order, a node is dropped
/// when a retained node's supply set is a subset of its own; a retained node
/// is evicted when a later node's set is a strict subset of it. Among equal
/// supply sets the first occurrence is kept. Terminals are excluded.
pub fn reduce_redundant(net: &Network, path: &Path) -> Vec<NodeIdx> {
    reduce_nodes(net, &path.interior(net))
}

pub(crate) fn reduce_nodes(net: &Network, nodes: &[NodeIdx]) -> Vec<NodeIdx> {
    let mut kept: Vec<NodeIdx> = Vec::new();
    for &v in nodes {
        let Some(set) = net.failure_set(v) else { continue };
        if kept
            .iter()
            .any(|&w| is_subset(&net.demand(w).supplies, set))
        {
            continue;
        }
        kept.retain(|&w| !is_subset(set, &net.demand(w).supplies));
        kept.push(v);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::chain_network;

    fn two_node_doc() -> NetworkDoc {
        NetworkDoc::from_json(
            r#"{
                "supply_nodes": [{"id": "u1", "p_fail": 0.1}, {"id": "u2", "p_fail": 0.2}],
                "demand_nodes": [
                    {"id": "a", "supplies": ["u1", "u2", "u1"]},
                    {"id": "b", "supplies": ["u2"]}
                ],
                "edges": [["a", "b"]]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn well_formed_network_has_no_violations() {
        assert!(validate_network(&two_node_doc()).is_empty());
    }

    #[test]
    fn missing_edge_endpoint_is_reported() {
        let mut doc = two_node_doc();
        doc.edges.push(["a".into(), "z".into()]);
        let violations = validate_network(&doc);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].element, "z");
    }

    #[test]
    fn empty_supplies_only_allowed_for_terminals() {
        let mut doc = two_node_doc();
        doc.demand_nodes.push(DemandDoc {
            id: "c".into(),
            supplies: vec![],
            x: None,
            y: None,
        });
        let violations = validate_network(&doc);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].element, "c");

        doc.terminals = Some(TerminalsDoc {
            s: "c".into(),
            t: "b".into(),
        });
        assert!(validate_network(&doc).is_empty());
    }

    #[test]
    fn other_violations() {
        let mut doc = two_node_doc();
        doc.supply_nodes[0].p_fail = 1.5;
        doc.edges.push(["a".into(), "a".into()]);
        doc.demand_nodes[1].supplies.push("nope".into());
        let elements: Vec<String> = validate_network(&doc).into_iter().map(|v| v.element).collect();
        assert_eq!(elements, vec!["u1", "nope", "a"]);
        assert!(matches!(Network::from_doc(&doc), Err(Error::InvalidNetwork(v)) if v.len() == 3));
    }

    #[test]
    fn duplicate_supplies_are_collapsed() {
        let net = Network::from_doc(&two_node_doc()).unwrap();
        assert_eq!(net.demand(0).supplies, vec![0, 1]);
        assert_eq!(net.supply_load(1), 2);
        assert_eq!(net.max_supply_load(), 2);
        assert_eq!(net.max_supply_degree(), 2);
    }

    #[test]
    fn node_failure_probabilities() {
        let net = Network::from_doc(&two_node_doc()).unwrap();
        assert!((node_failure_probability(&net, 0) - 0.02).abs() < 1e-15);
        let net = chain_network(&[&[1]], 0.3);
        let v = net.node_index("v1").unwrap();
        assert_eq!(node_failure_probability(&net, v), 0.3);
        let (s, t) = net.terminals().unwrap();
        assert_eq!(node_failure_probability(&net, s), 0.0);
        assert_eq!(node_failure_probability(&net, t), 0.0);
    }

    #[test]
    fn long_products_use_log_space() {
        let factors = vec![0.5; 40];
        let p = probability_product(factors.into_iter(), 40);
        assert!((p / 0.5f64.powi(40) - 1.0).abs() < 1e-12);
        assert_eq!(probability_product([0.5, 0.0].into_iter().cycle().take(40), 40), 0.0);
    }

    #[test]
    fn path_validation() {
        let net = chain_network(&[&[1], &[2]], 0.1);
        assert!(Path::parse(&net, "s,v1,v2,t").is_ok());
        assert!(matches!(Path::parse(&net, "s,v2"), Err(Error::InvalidPath(_))));
        assert!(matches!(Path::parse(&net, "s,v1,s"), Err(Error::InvalidPath(_))));
        assert!(matches!(Path::parse(&net, "s,q"), Err(Error::UnknownNode(_))));
        let p = Path::parse(&net, "s,v1,v2,t").unwrap();
        assert_eq!(p.interior(&net).len(), 2);
        assert_eq!(p.display(&net), "s,v1,v2,t");
    }

    fn reduced_sets(sets: &[&[u32]]) -> Vec<Vec<u32>> {
        let net = chain_network(sets, 0.1);
        let path = Path::new(&net, crate::fixtures::chain_nodes(&net)).unwrap();
        reduce_redundant(&net, &path)
            .into_iter()
            .map(|v| {
                net.demand(v)
                    .supplies
                    .iter()
                    .map(|&u| net.supply(u).id[1..].parse().unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn redundant_nodes_are_removed() {
        assert_eq!(reduced_sets(&[&[1, 2], &[1], &[3]]), vec![vec![1], vec![3]]);
        assert_eq!(reduced_sets(&[&[1, 2], &[1, 2], &[3, 4]]), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(reduced_sets(&[&[1], &[2], &[3]]), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn subset_helper() {
        assert!(is_subset(&[], &[1]));
        assert!(is_subset(&[1, 3], &[1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[1, 2, 3]));
        assert!(!is_subset(&[0], &[1, 2]));
        assert_eq!(union_of(&[1, 3], &[2, 3]), vec![1, 2, 3]);
    }

    #[test]
    fn doc_round_trip_is_sorted_and_stable() {
        let net = Network::from_doc(&two_node_doc()).unwrap();
        let doc = net.to_doc();
        assert_eq!(doc.demand_nodes[0].supplies, vec!["u1", "u2"]);
        let again = Network::from_doc(&doc).unwrap().to_doc();
        assert_eq!(doc.to_json().unwrap(), again.to_json().unwrap());
    }

    #[test]
    fn disjoint_pair_validation() {
        let net = crate::fixtures::ladder_network(&[&[1], &[2]], &[&[3], &[4]], 0.1);
        let p1 = Path::parse(&net, "s,a1,a2,t").unwrap();
        let p2 = Path::parse(&net, "s,b1,b2,t").unwrap();
        assert!(PathPair::new(&net, p1.clone(), p2, true).is_ok());
        assert!(PathPair::new(&net, p1.clone(), p1.clone(), true).is_err());
        assert!(PathPair::new(&net, p1.clone(), p1, false).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn reduce_is_idempotent(sets in proptest::collection::vec(
            proptest::collection::btree_set(1u32..6, 1..4), 1..7)) {
            let sets: Vec<Vec<u32>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            let refs: Vec<&[u32]> = sets.iter().map(Vec::as_slice).collect();
            let net = chain_network(&refs, 0.1);
            let once = reduce_nodes(&net, &crate::fixtures::chain_nodes(&net));
            let twice = reduce_nodes(&net, &once);
            proptest::prop_assert_eq!(once, twice);
        }

        #[test]
        fn node_failure_monotone(p in 0.0f64..1.0, q in 0.0f64..1.0, bump in 0.0f64..1.0) {
            let doc = NetworkDoc::from_json(&format!(r#"{{
                "supply_nodes": [{{"id": "u1", "p_fail": {p}}}, {{"id": "u2", "p_fail": {q}}}],
                "demand_nodes": [{{"id": "a", "supplies": ["u1", "u2"]}}]
            }}"#)).unwrap();
            let before = node_failure_probability(&Network::from_doc(&doc).unwrap(), 0);
            let mut raised = doc.clone();
            raised.supply_nodes[0].p_fail = p + (1.0 - p) * bump;
            let after = node_failure_probability(&Network::from_doc(&raised).unwrap(), 0);
            proptest::prop_assert!(after >= before);
        }
    }
}
