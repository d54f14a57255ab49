//! Round-by-round data gathering with energy drain and half-life
//! rescheduling.
//!
//! A trial runs until the first sensor cannot afford its round. Under
//! [`Scheduler::Lds`] the base station starts a reschedule phase once the
//! current schedule has run `max(1, ⌊L_min/2⌋ − κ)` rounds: the next κ rounds
//! carry piggybacked control data (charged as `piggyback_overhead` extra
//! bits), after which a fresh max-min tree is built from the residual
//! energies and the round counter restarts.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::energy::{EnergyLedger, RadioParams, DEFAULT_INITIAL_ENERGY_J};
use crate::protocol::run_distributed_build;
use crate::schedule::{
    build_greedy_maxmin, build_mst, build_spt, min_expected_lifetime, tree_depth, RoutingTree,
    WeightedGraph,
};
use crate::topology::TopologyGraph;
use crate::{Error, NodeId, Result};

pub const DEFAULT_PIGGYBACK_OVERHEAD: f64 = 0.10;
pub const DEFAULT_MAX_ROUNDS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scheduler {
    #[serde(rename = "LDS")]
    Lds,
    #[serde(rename = "WRT")]
    WrtStatic,
    #[serde(rename = "MST")]
    Mst,
    #[serde(rename = "SPT")]
    Spt,
}

impl Scheduler {
    pub const ALL: [Scheduler; 4] = [
        Scheduler::Lds,
        Scheduler::WrtStatic,
        Scheduler::Mst,
        Scheduler::Spt,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Scheduler::Lds => "LDS",
            Scheduler::WrtStatic => "WRT",
            Scheduler::Mst => "MST",
            Scheduler::Spt => "SPT",
        }
    }

    fn uses_greedy(&self) -> bool {
        matches!(self, Scheduler::Lds | Scheduler::WrtStatic)
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lds" => Ok(Scheduler::Lds),
            "wrt" | "wrt_static" => Ok(Scheduler::WrtStatic),
            "mst" => Ok(Scheduler::Mst),
            "spt" => Ok(Scheduler::Spt),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected lds, wrt, mst or spt)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheduler: Scheduler,
    pub piggyback_overhead: f64,
    pub radio: RadioParams,
    pub initial_energy: f64,
    /// Charge the initial distributed build's tuples as control packets of
    /// `piggyback_overhead × k` bits. Only meaningful for greedy schedulers.
    pub charge_build_messages: bool,
    /// Hard stop for configurations where rounds cost nothing.
    pub max_rounds: u64,
}

impl SimConfig {
    pub fn new(scheduler: Scheduler) -> Self {
        Self {
            scheduler,
            piggyback_overhead: DEFAULT_PIGGYBACK_OVERHEAD,
            radio: RadioParams::standard(),
            initial_energy: DEFAULT_INITIAL_ENERGY_J,
            charge_build_messages: false,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub tree: RoutingTree,
    pub ledger: EnergyLedger,
    /// Rounds completed under the current schedule.
    pub round_in_schedule: u64,
    /// Rounds completed in the whole trial.
    pub round: u64,
    pub l_min_current: f64,
    pub kappa: usize,
    /// Piggyback rounds still to run in the current reschedule phase.
    pub rescheduling: Option<usize>,
    static_costs: Vec<f64>,
}

impl SimState {
    pub fn new(tree: RoutingTree, ledger: EnergyLedger, g: &WeightedGraph) -> Self {
        let mut state = Self {
            l_min_current: 0.0,
            kappa: 0,
            tree,
            ledger,
            round_in_schedule: 0,
            round: 0,
            rescheduling: None,
            static_costs: Vec::new(),
        };
        state.install(g);
        state
    }

    fn install(&mut self, g: &WeightedGraph) {
        self.static_costs = (0..self.tree.sensor_count())
            .map(|i| self.tree.round_cost(i, g))
            .collect();
        self.l_min_current = min_expected_lifetime(&self.tree, &self.ledger, g).l_min;
        self.kappa = tree_depth(&self.tree);
        self.round_in_schedule = 0;
    }

    /// Per-round cost of each sensor under the current tree, without
    /// piggyback inflation.
    pub fn static_costs(&self) -> &[f64] {
        &self.static_costs
    }
}

/// Energy charged in one completed round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: u64,
    pub piggybacked: bool,
    pub charged: Vec<f64>,
}

/// A sensor could not afford its round; the round did not run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeDeath {
    pub node: NodeId,
    pub round: u64,
}

pub fn run_round(state: &mut SimState, cfg: &SimConfig) -> std::result::Result<RoundReport, NodeDeath> {
    let piggybacked = state.rescheduling.is_some();
    let factor = if piggybacked {
        1.0 + cfg.piggyback_overhead
    } else {
        1.0
    };
    let charged: Vec<f64> = state.static_costs.iter().map(|&c| c * factor).collect();
    if let Some(node) = (0..charged.len()).find(|&i| state.ledger.residual(i) < charged[i]) {
        return Err(NodeDeath {
            node,
            round: state.round + 1,
        });
    }
    for (i, &c) in charged.iter().enumerate() {
        state
            .ledger
            .drain(i, c)
            .expect("affordability checked before draining");
    }
    state.round += 1;
    state.round_in_schedule += 1;
    state.rescheduling = match state.rescheduling {
        Some(left) if left > 1 => Some(left - 1),
        _ => None,
    };
    Ok(RoundReport {
        round: state.round,
        piggybacked,
        charged,
    })
}

/// Round of the current schedule at which the reschedule broadcast goes out.
pub fn trigger_round(l_min: f64, kappa: usize) -> u64 {
    let half = (l_min / 2.0).floor();
    let target = half - kappa as f64;
    if target < 1.0 {
        1
    } else if target >= u64::MAX as f64 {
        u64::MAX
    } else {
        target as u64
    }
}

pub fn check_reschedule_trigger(state: &SimState, cfg: &SimConfig) -> bool {
    cfg.scheduler == Scheduler::Lds
        && state.rescheduling.is_none()
        && state.l_min_current > state.kappa as f64
        && state.round_in_schedule == trigger_round(state.l_min_current, state.kappa)
}

/// One completed schedule switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescheduleRecord {
    pub round: u64,
    pub l_min: f64,
    pub kappa: usize,
}

/// Runs the κ piggybacked rounds on the current tree, then switches to a
/// fresh max-min tree built from the residual energies.
pub fn execute_reschedule<F>(
    state: &mut SimState,
    cfg: &SimConfig,
    g: &WeightedGraph,
    observer: &mut F,
) -> std::result::Result<RescheduleRecord, NodeDeath>
where
    F: FnMut(&RoundReport, &EnergyLedger),
{
    state.rescheduling = Some(state.kappa);
    for _ in 0..state.kappa {
        let report = run_round(state, cfg)?;
        observer(&report, &state.ledger);
    }
    state.tree = build_greedy_maxmin(g, &state.ledger).expect("topology was connected at start");
    state.install(g);
    Ok(RescheduleRecord {
        round: state.round,
        l_min: state.l_min_current,
        kappa: state.kappa,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyAudit {
    pub drained_total: f64,
    /// `n × initial − Σ residual`.
    pub consumed: f64,
    pub residual: Vec<f64>,
}

impl EnergyAudit {
    pub fn relative_error(&self) -> f64 {
        let scale = self.drained_total.abs().max(self.consumed.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.drained_total - self.consumed).abs() / scale
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub scheduler: Scheduler,
    pub lifetime_rounds: u64,
    pub reschedule_count: usize,
    pub history: Vec<RescheduleRecord>,
    pub first_dead_node: Option<NodeId>,
    pub l_min_initial: f64,
    pub kappa_initial: usize,
    pub energy_audit: EnergyAudit,
}

impl TrialResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reference reschedule count `round(log₂ L_min)`, for reporting.
pub fn reschedule_count_model(l_min_initial: f64) -> u64 {
    if l_min_initial <= 1.0 {
        0
    } else {
        l_min_initial.log2().round() as u64
    }
}

pub fn initial_tree(g: &WeightedGraph, ledger: &EnergyLedger, scheduler: Scheduler) -> Result<RoutingTree> {
    match scheduler {
        Scheduler::Lds | Scheduler::WrtStatic => build_greedy_maxmin(g, ledger),
        Scheduler::Mst => build_mst(g),
        Scheduler::Spt => build_spt(g),
    }
}

pub fn run_trial(topology: &TopologyGraph, cfg: &SimConfig) -> Result<TrialResult> {
    run_trial_observed(topology, cfg, |_, _| {})
}

/// Like [`run_trial`], calling `observer` after every completed round.
pub fn run_trial_observed<F>(topology: &TopologyGraph, cfg: &SimConfig, mut observer: F) -> Result<TrialResult>
where
    F: FnMut(&RoundReport, &EnergyLedger),
{
    let g = WeightedGraph::from_topology(topology, &cfg.radio);
    let mut ledger = EnergyLedger::uniform(g.sensor_count(), cfg.initial_energy);
    let tree = initial_tree(&g, &ledger, cfg.scheduler)?;

    let mut build_death = None;
    if cfg.charge_build_messages && cfg.scheduler.uses_greedy() {
        build_death = charge_build(&g, &mut ledger, &tree, cfg)?;
    }

    let mut state = SimState::new(tree, ledger, &g);
    let l_min_initial = state.l_min_current;
    let kappa_initial = state.kappa;
    let mut history = Vec::new();

    let first_dead_node = match build_death {
        Some(node) => Some(node),
        None => loop {
            if state.round >= cfg.max_rounds {
                break None;
            }
            match run_round(&mut state, cfg) {
                Ok(report) => observer(&report, &state.ledger),
                Err(death) => break Some(death.node),
            }
            if check_reschedule_trigger(&state, cfg) {
                match execute_reschedule(&mut state, cfg, &g, &mut observer) {
                    Ok(record) => history.push(record),
                    Err(death) => break Some(death.node),
                }
            }
        },
    };

    let energy_audit = EnergyAudit {
        drained_total: state.ledger.drained_total(),
        consumed: state.ledger.consumed_from_residuals(),
        residual: state.ledger.residuals().to_vec(),
    };
    Ok(TrialResult {
        scheduler: cfg.scheduler,
        lifetime_rounds: state.round,
        reschedule_count: history.len(),
        history,
        first_dead_node,
        l_min_initial,
        kappa_initial,
        energy_audit,
    })
}

/// Charges the distributed build's convergecast tuples. Returns the first
/// sensor that could not pay, if any.
fn charge_build(
    g: &WeightedGraph,
    ledger: &mut EnergyLedger,
    tree: &RoutingTree,
    cfg: &SimConfig,
) -> Result<Option<NodeId>> {
    let (built, trace) = run_distributed_build(g, ledger)?;
    debug_assert_eq!(&built, tree);
    let n = g.sensor_count();
    let fraction = cfg.piggyback_overhead;
    let mut received = vec![0usize; n + 1];
    for (i, &p) in tree.parents().iter().enumerate() {
        received[p] += trace.sent_per_node[i];
    }
    for i in 0..n {
        let w_out = g.weight(i, tree.parent(i)).expect("tree edge");
        let cost = fraction
            * (trace.sent_per_node[i] as f64 * w_out + received[i] as f64 * g.rx());
        if ledger.drain(i, cost).is_err() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
