//! Random scenarios: demand topology, supply placement, supply assignment
//! and failure probabilities, all driven by one seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandDoc, Network, NetworkDoc, SupplyDoc, TerminalsDoc};

/// Longitude/latitude box of the continental US.
pub const DEFAULT_BBOX: BoundingBox = BoundingBox {
    x_min: -125.0,
    y_min: 25.0,
    x_max: -67.0,
    y_max: 49.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    fn sample<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        (
            rng.gen_range(self.x_min..=self.x_max),
            rng.gen_range(self.y_min..=self.y_max),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Supplies of the document are discarded; demand nodes, edges and
    /// terminals are kept.
    Given(NetworkDoc),
    /// Points uniform in the box joined when closer than `radius`; components
    /// are then linked through their closest pair. Terminals are the
    /// westmost and eastmost nodes.
    Geometric { nodes: usize, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentRule {
    /// The `k` closest supplies (Euclidean; ties by supply id).
    NearestK(usize),
    /// `k` distinct supplies uniformly at random.
    UniformRandomK(usize),
    /// A count drawn uniformly from `lo..=hi`, then that many random supplies.
    RandomKInRange { lo: usize, hi: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PFailRule {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub topology: Topology,
    pub supply_count: usize,
    pub assignment: AssignmentRule,
    pub p_fail: PFailRule,
    pub bbox: BoundingBox,
    pub seed: u64,
}

impl Scenario {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        let (lo, hi) = match self.assignment {
            AssignmentRule::NearestK(k) | AssignmentRule::UniformRandomK(k) => (k, k),
            AssignmentRule::RandomKInRange { lo, hi } => (lo, hi),
        };
        if lo < 1 || lo > hi {
            return bad(format!("supplies per node must satisfy 1 <= lo <= hi, got {lo}..{hi}"));
        }
        if hi > self.supply_count {
            return bad(format!("{hi} supplies per node but only {} supplies", self.supply_count));
        }
        let (p_lo, p_hi) = match self.p_fail {
            PFailRule::Constant(p) => (p, p),
            PFailRule::Uniform { lo, hi } => (lo, hi),
        };
        if !(0.0..=1.0).contains(&p_lo) || !(0.0..=1.0).contains(&p_hi) || p_lo > p_hi {
            return bad(format!("failure probability interval [{p_lo}, {p_hi}] outside [0, 1]"));
        }
        let b = &self.bbox;
        if !(b.x_min <= b.x_max && b.y_min <= b.y_max) || ![b.x_min, b.x_max, b.y_min, b.y_max].iter().all(|v| v.is_finite()) {
            return bad("bounding box is empty".into());
        }
        if let Topology::Geometric { nodes, radius } = self.topology {
            if nodes < 2 {
                return bad("a geometric topology needs at least two nodes".into());
            }
            if radius.is_nan() || radius < 0.0 {
                return bad("radius must be non-negative".into());
            }
        }
        Ok(())
    }
}

/// One generator per concern so that, e.g., changing the p rule leaves the
/// supply positions untouched.
fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn geometric_topology(nodes: usize, radius: f64, bbox: &BoundingBox, seed: u64) -> NetworkDoc {
    let mut rng = stream(seed, 0);
    let width = (nodes - 1).to_string().len();
    let points: Vec<(f64, f64)> = (0..nodes).map(|_| bbox.sample(&mut rng)).collect();
    let mut edges = Vec::new();
    let mut comp: Vec<usize> = (0..nodes).collect();
    fn root(comp: &mut [usize], mut v: usize) -> usize {
        while comp[v] != v {
            comp[v] = comp[comp[v]];
            v = comp[v];
        }
        v
    }
    for a in 0..nodes {
        for b in a + 1..nodes {
            if dist2(points[a], points[b]) <= radius * radius {
                edges.push((a, b));
                let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
                comp[ra] = rb;
            }
        }
    }
    // link components through their closest pair until connected
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..nodes {
            for b in a + 1..nodes {
                if root(&mut comp, a) != root(&mut comp, b) {
                    let d = dist2(points[a], points[b]);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, a, b));
                    }
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        edges.push((a, b));
        let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
        comp[ra] = rb;
    }
    edges.sort_unstable();
    let id = |i: usize| format!("v{i:0width$}");
    let by_x = |a: &usize, b: &usize| points[*a].0.total_cmp(&points[*b].0).then(a.cmp(b));
    let s = (0..nodes).min_by(by_x).unwrap();
    let t = (0..nodes).max_by(by_x).unwrap();
    NetworkDoc {
        supply_nodes: Vec::new(),
        demand_nodes: points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| DemandDoc {
                id: id(i),
                supplies: Vec::new(),
                x: Some(x),
                y: Some(y),
            })
            .collect(),
        edges: edges.into_iter().map(|(a, b)| [id(a), id(b)]).collect(),
        terminals: Some(TerminalsDoc { s: id(s), t: id(t) }),
    }
}

/// Builds the network document of `sc`. Terminals receive no supplies.
pub fn gen_scenario_doc(sc: &Scenario) -> Result<NetworkDoc> {
    sc.check()?;
    let mut doc = match &sc.topology {
        Topology::Given(doc) => doc.clone(),
        Topology::Geometric { nodes, radius } => geometric_topology(*nodes, *radius, &sc.bbox, sc.seed),
    };
    let terminals = doc
        .terminals
        .clone()
        .ok_or_else(|| Error::Scenario("topology has no terminals".into()))?;

    let width = sc.supply_count.saturating_sub(1).to_string().len();
    let mut place = stream(sc.seed, 1);
    let mut prob = stream(sc.seed, 2);
    let mut pick = stream(sc.seed, 3);
    doc.supply_nodes = (0..sc.supply_count)
        .map(|u| {
            let (x, y) = sc.bbox.sample(&mut place);
            let p_fail = match sc.p_fail {
                PFailRule::Constant(p) => p,
                PFailRule::Uniform { lo, hi } => prob.gen_range(lo..=hi),
            };
            SupplyDoc {
                id: format!("u{u:0width$}"),
                p_fail,
                x: Some(x),
                y: Some(y),
            }
        })
        .collect();

    for node in &mut doc.demand_nodes {
        if node.id == terminals.s || node.id == terminals.t {
            node.supplies.clear();
            continue;
        }
        let chosen: Vec<usize> = match sc.assignment {
            AssignmentRule::NearestK(k) => {
                let (Some(x), Some(y)) = (node.x, node.y) else {
                    return Err(Error::Scenario(format!(
                        "node `{}` has no coordinates for nearest-k assignment",
                        node.id
                    )));
                };
                let mut order: Vec<(f64, usize)> = doc
                    .supply_nodes
                    .iter()
                    .enumerate()
                    .map(|(u, s)| (dist2((x, y), (s.x.unwrap(), s.y.unwrap())), u))
                    .collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                order.into_iter().take(k).map(|(_, u)| u).collect()
            }
            AssignmentRule::UniformRandomK(k) => sample(&mut pick, sc.supply_count, k).into_vec(),
            AssignmentRule::RandomKInRange { lo, hi } => {
                let k = pick.gen_range(lo..=hi);
                sample(&mut pick, sc.supply_count, k).into_vec()
            }
        };
        let mut chosen = chosen;
        chosen.sort_unstable();
        node.supplies = chosen.into_iter().map(|u| doc.supply_nodes[u].id.clone()).collect();
    }
    Ok(doc)
}

pub fn gen_scenario(sc: &Scenario) -> Result<Network> {
    Network::from_doc(&gen_scenario_doc(sc)?)
}
