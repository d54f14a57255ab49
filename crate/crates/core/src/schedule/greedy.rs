use std::cmp::Ordering;

use super::{node_lifetime, RoutingTree, WeightedGraph};
use crate::energy::EnergyLedger;
use crate::{Error, NodeId, Result};

/// Ranking of a candidate attachment of `child` under `parent`.
///
/// Higher score wins; equal scores go to the smaller child id, then the
/// smaller parent id. This is a total order whenever scores are not NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttachKey {
    pub score: f64,
    pub child: NodeId,
    pub parent: NodeId,
}

impl AttachKey {
    pub fn rank(&self, other: &AttachKey) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.child.cmp(&self.child))
            .then_with(|| other.parent.cmp(&self.parent))
    }

    pub fn beats(&self, other: &AttachKey) -> bool {
        self.rank(other) == Ordering::Greater
    }
}

/// Grows a tree from the base station one sensor at a time, always taking
/// the frontier attachment whose resulting minimum expected lifetime is
/// largest.
pub fn build_greedy_maxmin(g: &WeightedGraph, ledger: &EnergyLedger) -> Result<RoutingTree> {
    let n = g.sensor_count();
    let bs = g.bs_id();
    let rx = g.rx();

    let mut in_tree = vec![false; n + 1];
    in_tree[bs] = true;
    let mut members: Vec<NodeId> = vec![bs];
    let mut parent = vec![usize::MAX; n];
    let mut w_out = vec![0.0; n];
    let mut in_degree = vec![0usize; n + 1];
    // Current expected lifetime of each attached sensor.
    let mut lifetime = vec![f64::INFINITY; n];

    for step in 0..n {
        // Smallest and second-smallest cached lifetimes, so that "minimum over
        // every other tree node" is O(1) per candidate parent.
        let (mut low, mut low_at, mut second) = (f64::INFINITY, usize::MAX, f64::INFINITY);
        for &m in &members {
            if m == bs {
                continue;
            }
            let l = lifetime[m];
            if l < low {
                second = low;
                low = l;
                low_at = m;
            } else if l < second {
                second = l;
            }
        }

        let mut best: Option<AttachKey> = None;
        for &i in &members {
            let others = if i == low_at { second } else { low };
            let parent_after = if i == bs {
                f64::INFINITY
            } else {
                node_lifetime(ledger.residual(i), in_degree[i] + 1, rx, w_out[i])
            };
            for &(j, w) in g.neighbors(i) {
                if in_tree[j] {
                    continue;
                }
                let child_new = node_lifetime(ledger.residual(j), 0, rx, w);
                let key = AttachKey {
                    score: child_new.min(parent_after).min(others),
                    child: j,
                    parent: i,
                };
                if best.map_or(true, |b| key.beats(&b)) {
                    best = Some(key);
                }
            }
        }

        let Some(chosen) = best else {
            return Err(Error::Disconnected {
                covered: step,
                total: n,
            });
        };
        let (j, i) = (chosen.child, chosen.parent);
        let w = g.weight(j, i).expect("frontier edge exists");
        in_tree[j] = true;
        members.push(j);
        parent[j] = i;
        w_out[j] = w;
        lifetime[j] = node_lifetime(ledger.residual(j), 0, rx, w);
        in_degree[i] += 1;
        if i != bs {
            lifetime[i] = node_lifetime(ledger.residual(i), in_degree[i], rx, w_out[i]);
        }
    }

    RoutingTree::from_parents(parent)
}
