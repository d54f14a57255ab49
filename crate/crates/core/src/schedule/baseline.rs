//! Minimum spanning tree and shortest path tree schedules.

use super::{RoutingTree, WeightedGraph};
use crate::{Error, Result};

/// Prim's algorithm grown from the base station; each sensor's parent is the
/// tree node it was attached through. Ties go to the smallest
/// `(weight, child, parent)`.
pub fn build_mst(g: &WeightedGraph) -> Result<RoutingTree> {
    let n = g.sensor_count();
    let bs = g.bs_id();
    let mut in_tree = vec![false; n + 1];
    // (weight, parent) of the cheapest known link into the tree.
    let mut link: Vec<Option<(f64, usize)>> = vec![None; n + 1];
    let mut parent = vec![usize::MAX; n];

    let mut u = bs;
    in_tree[bs] = true;
    for step in 0..n {
        for &(v, w) in g.neighbors(u) {
            if in_tree[v] {
                continue;
            }
            let better = match link[v] {
                None => true,
                Some((bw, bp)) => w < bw || (w == bw && u < bp),
            };
            if better {
                link[v] = Some((w, u));
            }
        }
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .filter_map(|v| link[v].map(|(w, p)| (w, v, p)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let Some((_, v, p)) = next else {
            return Err(Error::Disconnected {
                covered: step,
                total: n,
            });
        };
        in_tree[v] = true;
        parent[v] = p;
        u = v;
    }
    RoutingTree::from_parents(parent)
}

/// Dijkstra toward the base station over link weights. Among equal-cost
/// paths the one with fewer hops wins, then the smaller parent id.
pub fn build_spt(g: &WeightedGraph) -> Result<RoutingTree> {
    let n = g.sensor_count();
    let bs = g.bs_id();
    let mut settled = vec![false; n + 1];
    let mut label: Vec<Option<(f64, usize)>> = vec![None; n + 1];
    let mut parent = vec![usize::MAX; n + 1];
    label[bs] = Some((0.0, 0));

    for step in 0..=n {
        let next = (0..=n)
            .filter(|&v| !settled[v])
            .filter_map(|v| label[v].map(|(c, h)| (c, h, v)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let Some((cost, hops, u)) = next else {
            return Err(Error::Disconnected {
                covered: step.saturating_sub(1),
                total: n,
            });
        };
        settled[u] = true;
        for &(v, w) in g.neighbors(u) {
            if settled[v] {
                continue;
            }
            let cand = (cost + w, hops + 1);
            let better = match label[v] {
                None => true,
                Some((c, h)) => {
                    cand.0 < c || (cand.0 == c && (cand.1 < h || (cand.1 == h && u < parent[v])))
                }
            };
            if better {
                label[v] = Some(cand);
                parent[v] = u;
            }
        }
    }
    parent.truncate(n);
    RoutingTree::from_parents(parent)
}
