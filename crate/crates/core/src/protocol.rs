//! Message-passing construction of the max-min lifetime tree.
//!
//! Each node is a [`NodeActor`] that only knows its one-hop neighbors. An
//! accretion iteration is a convergecast: every in-tree sensor waits for one
//! [`ProtocolMessage::CandidateTuple`] from each child, folds them with its own
//! best local attachment, and forwards the winner to its parent. The base
//! station picks the global winner and broadcasts
//! [`ProtocolMessage::AttachAnnounce`], which also carries the new minimum
//! expected lifetime so that every node can score candidates exactly as the
//! centralized builder does.
//!
//! [`run_distributed_build`] drives all actors in lockstep ticks: messages
//! sent during tick `t` are delivered at tick `t + 1`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::energy::EnergyLedger;
use crate::schedule::{node_lifetime, AttachKey, RoutingTree, WeightedGraph};
use crate::{Error, NodeId, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    OutOfTree,
    InTree,
}

/// `(v_m, L_m, v_m', L_m')`: attach `child` under `parent`; `parent_after` is
/// the parent's lifetime once it gains the child (infinite for the base
/// station) and `child_new` the child's lifetime as a fresh leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub parent: NodeId,
    pub parent_after: f64,
    pub child: NodeId,
    pub child_new: f64,
}

impl Candidate {
    /// Post-attachment minimum lifetime given the current tree minimum.
    pub fn key(&self, tree_min: f64) -> AttachKey {
        AttachKey {
            score: self.child_new.min(self.parent_after).min(tree_min),
            child: self.child,
            parent: self.parent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolMessage {
    /// Convergecast report from `from` to its parent. `None` when nothing in
    /// the sender's subtree can attach a new node.
    CandidateTuple {
        from: NodeId,
        candidate: Option<Candidate>,
    },
    /// Base station broadcast. `l_min` is the tree minimum after this
    /// attachment; `done` marks the last one.
    AttachAnnounce {
        child: NodeId,
        parent: NodeId,
        l_min: f64,
        done: bool,
    },
}

/// What a node knows about one neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborInfo {
    pub id: NodeId,
    pub residual: f64,
    pub weight: f64,
    pub in_tree: bool,
}

#[derive(Debug, Clone)]
pub struct NodeActor {
    pub id: NodeId,
    pub status: Status,
    pub parent: Option<NodeId>,
    pub in_neighbors: BTreeSet<NodeId>,
    pub cached_candidate: Option<Candidate>,
    pub neighbor_view: Vec<NeighborInfo>,
    residual: f64,
    rx: f64,
    is_bs: bool,
    tree_min: f64,
    awaiting: BTreeSet<NodeId>,
    reported: bool,
    finished: bool,
    sensor_count: usize,
    attached: usize,
}

impl NodeActor {
    /// Builds the initial actor for `id` from the graph and energy view.
    pub fn new(id: NodeId, g: &WeightedGraph, ledger: &EnergyLedger) -> Self {
        let bs = g.bs_id();
        let neighbor_view = g
            .neighbors(id)
            .iter()
            .map(|&(j, w)| NeighborInfo {
                id: j,
                residual: if j == bs { f64::INFINITY } else { ledger.residual(j) },
                weight: w,
                in_tree: j == bs,
            })
            .collect();
        let is_bs = id == bs;
        Self {
            id,
            status: if is_bs { Status::InTree } else { Status::OutOfTree },
            parent: None,
            in_neighbors: BTreeSet::new(),
            cached_candidate: None,
            neighbor_view,
            residual: if is_bs { f64::INFINITY } else { ledger.residual(id) },
            rx: g.rx(),
            is_bs,
            tree_min: f64::INFINITY,
            awaiting: BTreeSet::new(),
            reported: false,
            finished: false,
            sensor_count: g.sensor_count(),
            attached: 0,
        }
    }

    pub fn is_bs(&self) -> bool {
        self.is_bs
    }

    /// One lockstep transition for a sensor.
    pub fn node_step(&mut self, inbox: &[ProtocolMessage]) -> Result<Vec<(NodeId, ProtocolMessage)>> {
        debug_assert!(!self.is_bs);
        self.absorb(inbox)?;
        if !self.ready_to_report() {
            return Ok(Vec::new());
        }
        self.fold_own_candidate();
        self.reported = true;
        let parent = self.parent.expect("in-tree sensor has a parent");
        Ok(vec![(
            parent,
            ProtocolMessage::CandidateTuple {
                from: self.id,
                candidate: self.cached_candidate,
            },
        )])
    }

    /// One lockstep transition for the base station. Returns the broadcast
    /// once every child has reported.
    pub fn bs_step(&mut self, inbox: &[ProtocolMessage]) -> Result<Option<ProtocolMessage>> {
        debug_assert!(self.is_bs);
        self.absorb(inbox)?;
        if !self.ready_to_report() {
            return Ok(None);
        }
        self.fold_own_candidate();
        self.reported = true;
        let Some(best) = self.cached_candidate else {
            return Err(Error::Disconnected {
                covered: self.attached,
                total: self.sensor_count,
            });
        };
        let key = best.key(self.tree_min);
        Ok(Some(ProtocolMessage::AttachAnnounce {
            child: best.child,
            parent: best.parent,
            l_min: key.score,
            done: self.attached + 1 == self.sensor_count,
        }))
    }

    fn ready_to_report(&self) -> bool {
        self.status == Status::InTree && !self.finished && !self.reported && self.awaiting.is_empty()
    }

    fn absorb(&mut self, inbox: &[ProtocolMessage]) -> Result<()> {
        for msg in inbox {
            if let ProtocolMessage::AttachAnnounce {
                child,
                parent,
                l_min,
                done,
            } = *msg
            {
                self.apply_announce(child, parent, l_min, done);
            }
        }
        for msg in inbox {
            if let ProtocolMessage::CandidateTuple { from, candidate } = *msg {
                if !self.in_neighbors.contains(&from) {
                    return Err(Error::ProtocolViolation(format!(
                        "node {} got a tuple from non-child {from}",
                        self.id
                    )));
                }
                if !self.awaiting.remove(&from) {
                    return Err(Error::ProtocolViolation(format!(
                        "node {} got a second tuple from {from} this iteration",
                        self.id
                    )));
                }
                if let Some(c) = candidate {
                    self.offer(c);
                }
            }
        }
        Ok(())
    }

    fn apply_announce(&mut self, child: NodeId, parent: NodeId, l_min: f64, done: bool) {
        self.tree_min = l_min;
        self.attached += 1;
        if let Some(nb) = self.neighbor_view.iter_mut().find(|nb| nb.id == child) {
            nb.in_tree = true;
        }
        if parent == self.id {
            self.in_neighbors.insert(child);
        }
        if child == self.id {
            self.status = Status::InTree;
            self.parent = Some(parent);
        }
        self.finished = done;
        if self.status == Status::InTree {
            self.awaiting = self.in_neighbors.clone();
            self.cached_candidate = None;
            self.reported = false;
        }
    }

    fn offer(&mut self, c: Candidate) {
        let better = match self.cached_candidate {
            None => true,
            Some(cur) => c.key(self.tree_min).beats(&cur.key(self.tree_min)),
        };
        if better {
            self.cached_candidate = Some(c);
        }
    }

    /// Best attachment of an out-of-tree neighbor directly under this node.
    pub fn local_candidate(&self) -> Option<Candidate> {
        let parent_after = if self.is_bs {
            f64::INFINITY
        } else {
            let parent = self.parent?;
            let w_out = self.neighbor_view.iter().find(|nb| nb.id == parent)?.weight;
            node_lifetime(self.residual, self.in_neighbors.len() + 1, self.rx, w_out)
        };
        self.neighbor_view
            .iter()
            .filter(|nb| !nb.in_tree)
            .map(|nb| Candidate {
                parent: self.id,
                parent_after,
                child: nb.id,
                child_new: node_lifetime(nb.residual, 0, self.rx, nb.weight),
            })
            .reduce(|a, b| {
                if b.key(self.tree_min).beats(&a.key(self.tree_min)) {
                    b
                } else {
                    a
                }
            })
    }

    fn fold_own_candidate(&mut self) {
        if let Some(c) = self.local_candidate() {
            self.offer(c);
        }
    }
}

/// Step and message accounting for one distributed build.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildTrace {
    pub steps: usize,
    pub messages: usize,
    pub attach_sequence: Vec<(NodeId, NodeId)>,
    /// Messages sent by each node, base station last.
    #[serde(skip)]
    pub sent_per_node: Vec<usize>,
    /// Tuples emitted during each accretion iteration.
    #[serde(skip)]
    pub tuples_per_iteration: Vec<usize>,
}

impl BuildTrace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Runs every actor in lockstep until all sensors are attached.
pub fn run_distributed_build(
    g: &WeightedGraph,
    ledger: &EnergyLedger,
) -> Result<(RoutingTree, BuildTrace)> {
    let n = g.sensor_count();
    let bs = g.bs_id();
    let mut actors: Vec<NodeActor> = (0..=n).map(|id| NodeActor::new(id, g, ledger)).collect();
    let mut inboxes: Vec<Vec<ProtocolMessage>> = vec![Vec::new(); n + 1];
    let mut trace = BuildTrace {
        steps: 0,
        messages: 0,
        attach_sequence: Vec::with_capacity(n),
        sent_per_node: vec![0; n + 1],
        tuples_per_iteration: vec![0],
    };
    let step_cap = 10 * (n + 1) * (n + 1) + 10;

    loop {
        let attached = trace.attach_sequence.len();
        if attached == n && inboxes.iter().all(Vec::is_empty) {
            break;
        }
        if trace.steps >= step_cap {
            return Err(Error::ProtocolViolation(format!(
                "build stalled after {} steps with {attached} of {n} attached",
                trace.steps
            )));
        }
        trace.steps += 1;

        let mut next: Vec<Vec<ProtocolMessage>> = vec![Vec::new(); n + 1];
        for (id, actor) in actors.iter_mut().enumerate().take(n) {
            let inbox = std::mem::take(&mut inboxes[id]);
            for (dst, msg) in actor.node_step(&inbox)? {
                trace.messages += 1;
                trace.sent_per_node[id] += 1;
                *trace.tuples_per_iteration.last_mut().unwrap() += 1;
                next[dst].push(msg);
            }
        }
        let inbox = std::mem::take(&mut inboxes[bs]);
        if let Some(announce) = actors[bs].bs_step(&inbox)? {
            if let ProtocolMessage::AttachAnnounce { child, parent, .. } = announce {
                trace.attach_sequence.push((child, parent));
            }
            trace.messages += 1;
            trace.sent_per_node[bs] += 1;
            if trace.attach_sequence.len() < n {
                trace.tuples_per_iteration.push(0);
            }
            for inbox in &mut next {
                inbox.push(announce.clone());
            }
        }
        inboxes = next;
    }

    let parents = actors[..n]
        .iter()
        .map(|a| {
            a.parent
                .ok_or_else(|| Error::ProtocolViolation(format!("sensor {} never attached", a.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((RoutingTree::from_parents(parents)?, trace))
}
