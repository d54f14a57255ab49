//! Routing trees, expected lifetimes, and the tree builders.
//!
//! Every builder works on a [`WeightedGraph`]: the topology with link costs
//! `w_ij` already evaluated, plus the per-packet receive cost. Residual
//! energies come from an [`EnergyLedger`].

mod baseline;
mod exhaustive;
mod greedy;

use std::collections::{BTreeMap, VecDeque};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::energy::{EnergyLedger, RadioParams};
use crate::topology::TopologyGraph;
use crate::{Error, NodeId, Result};

pub use baseline::{build_mst, build_spt};
pub use exhaustive::{brute_force_optimal, MAX_EXHAUSTIVE_SENSORS};
pub use greedy::{build_greedy_maxmin, AttachKey};

/// Topology with link costs: `G(V, RE, E, W)` minus the energies.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    rx: f64,
    /// Sorted by neighbor id; weights are symmetric.
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

impl WeightedGraph {
    pub fn from_topology(g: &TopologyGraph, radio: &RadioParams) -> Self {
        let adjacency = (0..g.node_count())
            .map(|i| {
                g.neighbors(i)
                    .iter()
                    .map(|&(j, d)| (j, radio.edge_weight(d)))
                    .collect()
            })
            .collect();
        Self {
            rx: radio.rx_cost(),
            adjacency,
        }
    }

    /// Graph with explicit weights over `sensors + 1` nodes (the last is the
    /// base station).
    pub fn from_weights(sensors: usize, rx: f64, edges: &[(NodeId, NodeId, f64)]) -> Self {
        let mut adjacency = vec![Vec::new(); sensors + 1];
        for &(i, j, w) in edges {
            assert!(i != j && w >= 0.0);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
            list.dedup_by_key(|&mut (j, _)| j);
        }
        Self { rx, adjacency }
    }

    pub fn sensor_count(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn bs_id(&self) -> NodeId {
        self.adjacency.len() - 1
    }

    /// Receive cost of one packet.
    pub fn rx(&self) -> f64 {
        self.rx
    }

    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[id]
    }

    pub fn weight(&self, i: NodeId, j: NodeId) -> Option<f64> {
        let list = &self.adjacency[i];
        list.binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|idx| list[idx].1)
    }
}

/// Expected rounds a node survives with `residual` energy, `in_degree`
/// children and uplink cost `w_out`.
pub fn node_lifetime(residual: f64, in_degree: usize, rx: f64, w_out: f64) -> f64 {
    let per_round = in_degree as f64 * rx + w_out;
    if per_round > 0.0 {
        residual / per_round
    } else {
        f64::INFINITY
    }
}

/// Base-station-rooted arborescence covering every sensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTree {
    root: NodeId,
    parent: Vec<NodeId>,
    in_degree: Vec<usize>,
    depth: usize,
}

impl RoutingTree {
    /// Validates that `parent` (indexed by sensor id) forms an arborescence
    /// toward `root = parent.len()`.
    pub fn from_parents(parent: Vec<NodeId>) -> Result<Self> {
        let n = parent.len();
        let root = n;
        let mut in_degree = vec![0usize; n + 1];
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n + 1];
        for (i, &p) in parent.iter().enumerate() {
            if p > n || p == i {
                return Err(Error::InvalidTree(format!("sensor {i} has parent {p}")));
            }
            in_degree[p] += 1;
            children[p].push(i);
        }
        // BFS from the root must reach every sensor exactly once.
        let mut hops = vec![usize::MAX; n + 1];
        hops[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut depth = 0;
        let mut reached = 0;
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                hops[c] = hops[u] + 1;
                depth = depth.max(hops[c]);
                reached += 1;
                queue.push_back(c);
            }
        }
        if reached != n {
            return Err(Error::InvalidTree(format!(
                "only {reached} of {n} sensors reach the root"
            )));
        }
        Ok(Self {
            root,
            parent,
            in_degree,
            depth,
        })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn sensor_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, sensor: NodeId) -> NodeId {
        self.parent[sensor]
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parent
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.in_degree[node]
    }

    /// Longest hop count from any sensor to the root.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Every tree edge is a graph edge.
    pub fn is_spanning_in(&self, g: &WeightedGraph) -> bool {
        g.sensor_count() == self.sensor_count()
            && self
                .parent
                .iter()
                .enumerate()
                .all(|(i, &p)| g.weight(i, p).is_some())
    }

    /// Energy one round costs `sensor`: receive from every child, send one
    /// packet up.
    pub fn round_cost(&self, sensor: NodeId, g: &WeightedGraph) -> f64 {
        let w_out = g
            .weight(sensor, self.parent[sensor])
            .expect("tree edge missing from graph");
        self.in_degree[sensor] as f64 * g.rx() + w_out
    }

    pub fn total_weight(&self, g: &WeightedGraph) -> f64 {
        self.parent
            .iter()
            .enumerate()
            .map(|(i, &p)| g.weight(i, p).expect("tree edge missing from graph"))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

impl Serialize for RoutingTree {
    /// `{"root":"BS", "parent":{"0":5,...}, "kappa":K}`
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parent: BTreeMap<String, NodeId> = self
            .parent
            .iter()
            .enumerate()
            .map(|(i, &p)| (i.to_string(), p))
            .collect();
        let mut st = s.serialize_struct("RoutingTree", 3)?;
        st.serialize_field("root", "BS")?;
        st.serialize_field("parent", &parent)?;
        st.serialize_field("kappa", &self.depth)?;
        st.end()
    }
}

pub fn tree_depth(t: &RoutingTree) -> usize {
    t.depth()
}

/// Per-sensor expected lifetimes and their minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeEstimate {
    pub per_node: Vec<f64>,
    pub l_min: f64,
    pub argmin: NodeId,
}

pub fn expected_lifetime(
    sensor: NodeId,
    t: &RoutingTree,
    ledger: &EnergyLedger,
    g: &WeightedGraph,
) -> f64 {
    let w_out = g
        .weight(sensor, t.parent(sensor))
        .expect("tree edge missing from graph");
    node_lifetime(ledger.residual(sensor), t.in_degree(sensor), g.rx(), w_out)
}

/// Ties on the minimum resolve to the smallest sensor id.
pub fn min_expected_lifetime(
    t: &RoutingTree,
    ledger: &EnergyLedger,
    g: &WeightedGraph,
) -> LifetimeEstimate {
    let per_node: Vec<f64> = (0..t.sensor_count())
        .map(|i| expected_lifetime(i, t, ledger, g))
        .collect();
    let (argmin, l_min) = per_node
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bl), (i, l)| {
            if l < bl {
                (i, l)
            } else {
                (bi, bl)
            }
        });
    LifetimeEstimate {
        per_node,
        l_min,
        argmin,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// BS, a = 0, b = 1 with w(a,BS)=5, w(b,BS)=9, w(a,b)=2, Rx = 2.
    pub fn three_node() -> (WeightedGraph, EnergyLedger) {
        let g = WeightedGraph::from_weights(2, 2.0, &[(0, 2, 5.0), (1, 2, 9.0), (0, 1, 2.0)]);
        (g, EnergyLedger::uniform(2, 1000.0))
    }

    /// BS ← a ← b with w(a,BS)=5, w(b,a)=3, Rx = 2.
    pub fn chain_tree() -> (WeightedGraph, EnergyLedger, RoutingTree) {
        let g = WeightedGraph::from_weights(2, 2.0, &[(0, 2, 5.0), (1, 0, 3.0)]);
        let t = RoutingTree::from_parents(vec![2, 0]).unwrap();
        (g, EnergyLedger::uniform(2, 1000.0), t)
    }
}
