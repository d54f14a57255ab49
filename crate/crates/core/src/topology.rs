//! Random deployments and the range-limited topology graph.

use std::collections::VecDeque;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, NodeId, Result};

/// Default cap on rejection-sampling attempts for connected deployments.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Rectangular deployment region anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub const fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= 0.0 && p.x < self.width && p.y >= 0.0 && p.y < self.height
    }
}

impl Default for Region {
    fn default() -> Self {
        Self::new(200.0, 200.0)
    }
}

/// Where the base station sits relative to the region.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BsPlacement {
    #[default]
    Center,
    /// The origin corner `(0, 0)`.
    Corner,
    Fixed(Point2D),
}

impl BsPlacement {
    pub fn position(&self, region: &Region) -> Point2D {
        match *self {
            BsPlacement::Center => Point2D::new(region.width / 2.0, region.height / 2.0),
            BsPlacement::Corner => Point2D::new(0.0, 0.0),
            BsPlacement::Fixed(p) => p,
        }
    }
}

impl FromStr for BsPlacement {
    type Err = Error;

    /// Accepts `center`, `corner`, or `x,y`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "center" => Ok(BsPlacement::Center),
            "corner" => Ok(BsPlacement::Corner),
            other => {
                let (x, y) = other
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("bad bs placement `{other}`")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|f| f.is_finite())
                        .ok_or_else(|| Error::Config(format!("bad bs coordinate `{v}`")))
                };
                Ok(BsPlacement::Fixed(Point2D::new(parse(x)?, parse(y)?)))
            }
        }
    }
}

/// Sensor positions plus the base station. Sensor `i` has id `i`; the base
/// station has id `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub sensors: Vec<Point2D>,
    pub bs: Point2D,
    pub region: Region,
    pub seed: u64,
}

impl Deployment {
    pub fn sensor_count(&self) -> usize {
        self.sensors.len()
    }

    pub fn bs_id(&self) -> NodeId {
        self.sensors.len()
    }

    /// Position of any node id, base station included.
    pub fn position(&self, id: NodeId) -> Point2D {
        if id == self.bs_id() {
            self.bs
        } else {
            self.sensors[id]
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DeploymentJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DeploymentJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

/// Wire form: `{"n", "region":[w,h], "bs":[x,y], "sensors":[[x,y],...], "seed"}`.
#[derive(Debug, Serialize, Deserialize)]
struct DeploymentJson {
    n: usize,
    region: [f64; 2],
    bs: [f64; 2],
    sensors: Vec<[f64; 2]>,
    seed: u64,
}

impl From<&Deployment> for DeploymentJson {
    fn from(d: &Deployment) -> Self {
        Self {
            n: d.sensors.len(),
            region: [d.region.width, d.region.height],
            bs: [d.bs.x, d.bs.y],
            sensors: d.sensors.iter().map(|p| [p.x, p.y]).collect(),
            seed: d.seed,
        }
    }
}

impl TryFrom<DeploymentJson> for Deployment {
    type Error = Error;

    fn try_from(raw: DeploymentJson) -> Result<Self> {
        if raw.n != raw.sensors.len() {
            return Err(Error::Config(format!(
                "deployment says n={} but lists {} sensors",
                raw.n,
                raw.sensors.len()
            )));
        }
        Ok(Deployment {
            sensors: raw.sensors.iter().map(|&[x, y]| Point2D::new(x, y)).collect(),
            bs: Point2D::new(raw.bs[0], raw.bs[1]),
            region: Region::new(raw.region[0], raw.region[1]),
            seed: raw.seed,
        })
    }
}

/// Undirected graph over sensors and the base station; `(i, j)` is an edge
/// iff their Euclidean distance is strictly below `r_max`.
#[derive(Debug, Clone)]
pub struct TopologyGraph {
    node_count: usize,
    r_max: f64,
    /// Sorted by neighbor id.
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

impl TopologyGraph {
    /// Builds a graph directly from an undirected edge list with distances.
    /// Node `node_count - 1` is the base station.
    pub fn from_edges(node_count: usize, r_max: f64, edges: &[(NodeId, NodeId, f64)]) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(i, j, d) in edges {
            assert!(i != j, "self-loop at {i}");
            assert!(d > 0.0, "edge ({i},{j}) has non-positive distance");
            adjacency[i].push((j, d));
            adjacency[j].push((i, d));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
            list.dedup_by_key(|&mut (j, _)| j);
        }
        Self {
            node_count,
            r_max,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn sensor_count(&self) -> usize {
        self.node_count - 1
    }

    pub fn bs_id(&self) -> NodeId {
        self.node_count - 1
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[id]
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> Option<f64> {
        let list = &self.adjacency[i];
        list.binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|idx| list[idx].1)
    }

    pub fn is_adjacent(&self, i: NodeId, j: NodeId) -> bool {
        self.distance(i, j).is_some()
    }

    /// Each undirected edge once, with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, d)| (i, j, d))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Draws `n` sensors uniformly over the region. Same seed, same deployment.
pub fn deploy_random(n: usize, region: Region, bs: BsPlacement, seed: u64) -> Deployment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_deployment(&mut rng, n, region, bs, seed)
}

fn sample_deployment(
    rng: &mut ChaCha8Rng,
    n: usize,
    region: Region,
    bs: BsPlacement,
    seed: u64,
) -> Deployment {
    assert!(n >= 1, "deployment needs at least one sensor");
    assert!(region.width > 0.0 && region.height > 0.0, "empty region");
    let sensors = (0..n)
        .map(|_| {
            Point2D::new(
                rng.gen_range(0.0..region.width),
                rng.gen_range(0.0..region.height),
            )
        })
        .collect();
    Deployment {
        sensors,
        bs: bs.position(&region),
        region,
        seed,
    }
}

pub fn build_topology(dep: &Deployment, r_max: f64) -> TopologyGraph {
    assert!(r_max > 0.0, "r_max must be positive");
    let node_count = dep.sensor_count() + 1;
    let mut edges = Vec::new();
    for i in 0..node_count {
        let pi = dep.position(i);
        for j in (i + 1)..node_count {
            let d = pi.distance(&dep.position(j));
            if d < r_max && d > 0.0 {
                edges.push((i, j, d));
            }
        }
    }
    TopologyGraph::from_edges(node_count, r_max, &edges)
}

/// Number of sensors reachable from the base station.
pub fn reachable_sensors(g: &TopologyGraph) -> usize {
    let bs = g.bs_id();
    let mut seen = vec![false; g.node_count()];
    seen[bs] = true;
    let mut queue = VecDeque::from([bs]);
    let mut count = 0;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count
}

pub fn is_connected(g: &TopologyGraph) -> bool {
    reachable_sensors(g) == g.sensor_count()
}

/// Rejection-samples deployments from a single seeded stream until the
/// topology at `r_max` is connected.
pub fn deploy_connected(
    n: usize,
    region: Region,
    bs: BsPlacement,
    seed: u64,
    r_max: f64,
    max_attempts: usize,
) -> Result<Deployment> {
    assert!(max_attempts >= 1, "max_attempts must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let dep = sample_deployment(&mut rng, n, region, bs, seed);
        if is_connected(&build_topology(&dep, r_max)) {
            return Ok(dep);
        }
    }
    Err(Error::ConnectivityFailure {
        attempts: max_attempts,
    })
}
