//! Exact max-min lifetime tree by enumeration, for small instances.

use super::{min_expected_lifetime, node_lifetime, RoutingTree, WeightedGraph};
use crate::energy::EnergyLedger;
use crate::{Error, NodeId, Result};

pub const MAX_EXHAUSTIVE_SENSORS: usize = 9;

/// Enumerates every base-station-rooted spanning arborescence (branch and
/// bound on the partial minimum lifetime) and returns one with the largest
/// minimum expected lifetime.
pub fn brute_force_optimal(g: &WeightedGraph, ledger: &EnergyLedger) -> Result<(RoutingTree, f64)> {
    let n = g.sensor_count();
    if n > MAX_EXHAUSTIVE_SENSORS {
        return Err(Error::TooLarge {
            n,
            max: MAX_EXHAUSTIVE_SENSORS,
        });
    }
    let mut search = Search {
        g,
        ledger,
        parent: vec![None; n],
        w_out: vec![0.0; n],
        in_degree: vec![0; n + 1],
        best: None,
    };
    search.assign(0);
    let (parents, _) = search.best.ok_or(Error::Disconnected {
        covered: 0,
        total: n,
    })?;
    let tree = RoutingTree::from_parents(parents)?;
    let value = min_expected_lifetime(&tree, ledger, g).l_min;
    Ok((tree, value))
}

struct Search<'a> {
    g: &'a WeightedGraph,
    ledger: &'a EnergyLedger,
    parent: Vec<Option<NodeId>>,
    w_out: Vec<f64>,
    in_degree: Vec<usize>,
    best: Option<(Vec<NodeId>, f64)>,
}

impl Search<'_> {
    fn assign(&mut self, i: usize) {
        let n = self.parent.len();
        if i == n {
            let value = self.partial_min();
            if self.best.as_ref().map_or(true, |(_, b)| value > *b) {
                let parents: Vec<NodeId> = self.parent.iter().map(|p| p.unwrap()).collect();
                self.best = Some((parents, value));
            }
            return;
        }
        for &(p, w) in self.g.neighbors(i) {
            if self.closes_cycle(i, p) {
                continue;
            }
            self.parent[i] = Some(p);
            self.w_out[i] = w;
            self.in_degree[p] += 1;
            // Adding edges only raises in-degrees, so the partial minimum is an
            // upper bound on any completion.
            let bound = self.partial_min();
            if self.best.as_ref().map_or(true, |(_, b)| bound > *b) {
                self.assign(i + 1);
            }
            self.in_degree[p] -= 1;
            self.parent[i] = None;
        }
    }

    fn closes_cycle(&self, child: NodeId, mut p: NodeId) -> bool {
        let bs = self.g.bs_id();
        loop {
            if p == child {
                return true;
            }
            if p == bs {
                return false;
            }
            match self.parent[p] {
                Some(next) => p = next,
                None => return false,
            }
        }
    }

    fn partial_min(&self) -> f64 {
        self.parent
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_some())
            .map(|(i, _)| {
                node_lifetime(
                    self.ledger.residual(i),
                    self.in_degree[i],
                    self.g.rx(),
                    self.w_out[i],
                )
            })
            .fold(f64::INFINITY, f64::min)
    }
}
