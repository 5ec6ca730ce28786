use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::model::{NodeIdx, SupplyIdx};

pub type VarIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    Binary,
    Integer { lo: i64, hi: i64 },
}

/// What a variable stands for; also determines its LP name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarRole {
    /// Arc `tail -> head` used by path `system` (0-based).
    Flow { system: usize, tail: NodeIdx, head: NodeIdx },
    /// Node on path `system`.
    NodeUse { system: usize, node: NodeIdx },
    /// Failure of the supply set `hit_sets[set]` disconnects the route.
    Hit { set: usize },
    Resilience,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub kind: VarKind,
    pub role: VarRole,
}

impl Variable {
    pub fn bounds(&self) -> (i64, i64) {
        match self.kind {
            VarKind::Binary => (0, 1),
            VarKind::Integer { lo, hi } => (lo, hi),
        }
    }

    pub fn name(&self) -> String {
        match self.role {
            VarRole::Flow { system, tail, head } => format!("x_{}_{tail}_{head}", system + 1),
            VarRole::NodeUse { system, node } => format!("b_{}_{node}", system + 1),
            VarRole::Hit { set } => format!("h_{set}"),
            VarRole::Resilience => "d".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cmp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

/// `sum(coef * var) cmp rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub terms: Vec<(VarIdx, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Fewest distinct size-`k` supply sets on a path of bottleneck `k`;
    /// `k` is `None` when the best path has no interior node.
    MinMbar { k: Option<usize> },
    MaxD,
    MinWeighted,
    /// Fewest distinct cross unions of size `d + 1` among pairs with all
    /// cross unions larger than `d`.
    MinPairMbar { d: i64 },
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::MinMbar { .. } => "min-mbar",
            ModelKind::MaxD => "max-d",
            ModelKind::MinWeighted => "min-weighted",
            ModelKind::MinPairMbar { .. } => "min-pair-mbar",
        }
    }
}

/// Arc variables of one path, ordered by `(tail, head)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowSystem {
    pub arcs: Vec<VarIdx>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlpModel {
    pub kind: ModelKind,
    pub sense: Sense,
    pub variables: Vec<Variable>,
    #[serde(serialize_with = "serialize_terms")]
    pub objective: Vec<(VarIdx, BigInt)>,
    pub rows: Vec<Row>,
    /// Big-M of the pair resilience rows.
    pub big_m: Option<i64>,
    /// `w(l)` by union cardinality `l`.
    #[serde(serialize_with = "serialize_weights")]
    pub weights: BTreeMap<usize, BigInt>,
    pub systems: Vec<FlowSystem>,
    pub source: NodeIdx,
    pub sink: NodeIdx,
    /// Supply sets indexed by `h_<set>`.
    pub hit_sets: Vec<Vec<SupplyIdx>>,
    /// Demand ids by node index, for LP comments.
    pub node_ids: Vec<String>,
}

fn serialize_terms<S: serde::Serializer>(terms: &[(VarIdx, BigInt)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(terms.len()))?;
    for (v, c) in terms {
        seq.serialize_element(&(v, c.to_string()))?;
    }
    seq.end()
}

fn serialize_weights<S: serde::Serializer>(w: &BTreeMap<usize, BigInt>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(w.len()))?;
    for (l, c) in w {
        map.serialize_entry(l, &c.to_string())?;
    }
    map.end()
}

impl IlpModel {
    pub fn new(kind: ModelKind, sense: Sense, source: NodeIdx, sink: NodeIdx, node_ids: Vec<String>) -> Self {
        Self {
            kind,
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            big_m: None,
            weights: BTreeMap::new(),
            systems: Vec::new(),
            source,
            sink,
            hit_sets: Vec::new(),
            node_ids,
        }
    }

    pub fn add_var(&mut self, kind: VarKind, role: VarRole) -> VarIdx {
        self.variables.push(Variable { kind, role });
        self.variables.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(VarIdx, i64)>, cmp: Cmp, rhs: i64) {
        self.rows.push(Row { terms, cmp, rhs });
    }

    pub fn var_index(&self, role: VarRole) -> Option<VarIdx> {
        self.variables.iter().position(|v| v.role == role)
    }

    /// Objective of a complete assignment.
    pub fn objective_value(&self, assignment: &[i64]) -> BigInt {
        self.objective
            .iter()
            .map(|(v, c)| c * BigInt::from(assignment[*v]))
            .sum()
    }

    /// Whether a complete assignment respects every bound and row.
    pub fn is_feasible(&self, assignment: &[i64]) -> bool {
        if assignment.len() != self.variables.len() {
            return false;
        }
        let in_bounds = self.variables.iter().zip(assignment).all(|(var, &x)| {
            let (lo, hi) = var.bounds();
            lo <= x && x <= hi
        });
        in_bounds
            && self.rows.iter().all(|row| {
                let lhs: i128 = row.terms.iter().map(|&(v, c)| c as i128 * assignment[v] as i128).sum();
                let rhs = row.rhs as i128;
                match row.cmp {
                    Cmp::Le => lhs <= rhs,
                    Cmp::Ge => lhs >= rhs,
                    Cmp::Eq => lhs == rhs,
                }
            })
    }
}
