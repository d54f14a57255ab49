#![allow(dead_code)]

use lds_core::energy::RadioParams;
use lds_core::schedule::WeightedGraph;
use lds_core::topology::{
    build_topology, deploy_connected, BsPlacement, Deployment, Point2D, Region, TopologyGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub deployment: Deployment,
    pub topology: TopologyGraph,
    pub r_max: f64,
}

impl Instance {
    pub fn weighted(&self) -> WeightedGraph {
        WeightedGraph::from_topology(&self.topology, &RadioParams::standard())
    }
}

/// Connected random instances with `n` and `r_max` drawn from the given
/// ranges; draws that cannot be connected are replaced.
pub fn random_instances(
    count: usize,
    n_range: std::ops::RangeInclusive<usize>,
    r_range: std::ops::RangeInclusive<f64>,
    region: Region,
    seed: u64,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(n_range.clone());
        let r_max = rng.gen_range(r_range.clone());
        let dep_seed = rng.gen::<u64>();
        if let Ok(deployment) = deploy_connected(n, region, BsPlacement::Center, dep_seed, r_max, 200) {
            let topology = build_topology(&deployment, r_max);
            out.push(Instance { deployment, topology, r_max });
        }
    }
    out
}

/// Sensors on a line at spacing 10 with the base station at one end; range
/// 15 makes the only spanning tree a chain.
pub fn chain(n: usize) -> Instance {
    let sensors = (0..n).map(|i| Point2D::new(10.0 * (i as f64 + 1.0), 5.0)).collect();
    let deployment = Deployment {
        sensors,
        bs: Point2D::new(0.0, 5.0),
        region: Region::new(10.0 * (n as f64 + 2.0), 10.0),
        seed: 0,
    };
    let topology = build_topology(&deployment, 15.0);
    Instance { deployment, topology, r_max: 15.0 }
}

/// Union-find connectivity over the edge list.
pub fn connected_by_union_find(node_count: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..node_count).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    (0..node_count).all(|v| find(&mut parent, v) == root)
}

/// Every BS-rooted spanning arborescence as a parent vector, by plain
/// enumeration of parent choices with a cycle check at the end.
pub fn all_arborescences(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.sensor_count();
    let bs = g.bs_id();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|i| g.neighbors(i).iter().map(|&(j, _)| j).collect())
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if choices.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let parents: Vec<usize> = (0..n).map(|i| choices[i][idx[i]]).collect();
        let reaches_root = (0..n).all(|start| {
            let mut v = start;
            for _ in 0..=n {
                if v == bs {
                    return true;
                }
                v = parents[v];
            }
            false
        });
        if reaches_root {
            out.push(parents);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Min over sensors of residual / (children·Rx + w_out), from scratch.
pub fn min_lifetime_of(parents: &[usize], g: &WeightedGraph, residual: &[f64]) -> f64 {
    let n = parents.len();
    let mut in_degree = vec![0usize; n + 1];
    for &p in parents {
        in_degree[p] += 1;
    }
    (0..n)
        .map(|i| {
            let w = g.weight(i, parents[i]).unwrap();
            residual[i] / (in_degree[i] as f64 * g.rx() + w)
        })
        .fold(f64::INFINITY, f64::min)
}
