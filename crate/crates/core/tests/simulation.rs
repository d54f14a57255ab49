mod common;

use common::random_instances;
use lds_core::energy::RadioParams;
use lds_core::schedule::WeightedGraph;
use lds_core::sim::{run_trial, run_trial_observed, Scheduler, SimConfig};
use lds_core::topology::Region;

/// ⌊min_i RE / cost_i⌋ with cost computed straight from geometry.
fn analytic_lifetime(inst: &common::Instance, parents: &[usize], radio: &RadioParams, initial: f64) -> u64 {
    let n = parents.len();
    let mut children = vec![0u64; n + 1];
    for &p in parents {
        children[p] += 1;
    }
    let k = radio.packet_bits as f64;
    (0..n)
        .map(|i| {
            let (a, b) = (inst.deployment.position(i), inst.deployment.position(parents[i]));
            let d2 = (a.x - b.x).powi(2) + (a.y - b.y).powi(2);
            let cost = children[i] as f64 * radio.eps_elec * k + radio.eps_elec * k + radio.eps_amp * k * d2;
            (initial / cost).floor() as u64
        })
        .min()
        .unwrap()
}

#[test]
fn static_schedulers_match_analytic_lifetime() {
    for inst in random_instances(40, 5..=50, 40.0..=100.0, Region::default(), 31) {
        for algo in [Scheduler::WrtStatic, Scheduler::Mst, Scheduler::Spt] {
            let cfg = SimConfig::new(algo);
            let g = WeightedGraph::from_topology(&inst.topology, &cfg.radio);
            let ledger = lds_core::energy::EnergyLedger::uniform(g.sensor_count(), cfg.initial_energy);
            let tree = lds_core::sim::initial_tree(&g, &ledger, algo).unwrap();
            let result = run_trial(&inst.topology, &cfg).unwrap();
            assert_eq!(
                result.lifetime_rounds,
                analytic_lifetime(&inst, tree.parents(), &cfg.radio, cfg.initial_energy),
                "{algo}"
            );
            assert_eq!(result.reschedule_count, 0);
            assert_eq!(result.lifetime_rounds, result.l_min_initial.floor() as u64);
        }
    }
}

#[test]
fn residuals_never_increase_and_audit_balances() {
    for inst in random_instances(15, 10..=60, 60.0..=100.0, Region::default(), 32) {
        for algo in Scheduler::ALL {
            let mut last: Option<Vec<f64>> = None;
            let result = run_trial_observed(&inst.topology, &SimConfig::new(algo), |_, ledger| {
                let now = ledger.residuals().to_vec();
                if let Some(prev) = &last {
                    assert!(now.iter().zip(prev).all(|(a, b)| a <= b));
                }
                last = Some(now);
            })
            .unwrap();
            assert!(result.energy_audit.relative_error() <= 1e-12);
        }
    }
}

#[test]
fn piggyback_rounds_cost_exactly_the_inflated_static_value() {
    for inst in random_instances(10, 20..=60, 60.0..=100.0, Region::default(), 33) {
        let cfg = SimConfig::new(Scheduler::Lds);
        let mut reports = Vec::new();
        let result = run_trial_observed(&inst.topology, &cfg, |r, _| reports.push(r.clone())).unwrap();
        assert!(result.reschedule_count > 0);
        // The round before a piggyback block runs at static cost on the same tree.
        for pair in reports.windows(2) {
            if !pair[0].piggybacked && pair[1].piggybacked {
                for (s, p) in pair[0].charged.iter().zip(&pair[1].charged) {
                    assert_eq!(*p, s * (1.0 + cfg.piggyback_overhead));
                }
            }
        }
        // Each switch follows exactly κ piggybacked rounds.
        let mut start = 0u64;
        let mut kappa = result.kappa_initial;
        for rec in &result.history {
            let block: Vec<_> = reports
                .iter()
                .filter(|r| r.round > start && r.round <= rec.round && r.piggybacked)
                .collect();
            assert_eq!(block.len(), kappa);
            assert_eq!(block.last().unwrap().round, rec.round);
            start = rec.round;
            kappa = rec.kappa;
        }
    }
}

#[test]
fn lds_history_respects_guard() {
    for inst in random_instances(10, 20..=80, 60.0..=100.0, Region::default(), 34) {
        let result = run_trial(&inst.topology, &SimConfig::new(Scheduler::Lds)).unwrap();
        assert_eq!(result.history.len(), result.reschedule_count);
        let mut l_min = result.l_min_initial;
        let mut kappa = result.kappa_initial;
        for rec in &result.history {
            assert!(l_min > kappa as f64, "rescheduled with l_min {l_min} <= kappa {kappa}");
            l_min = rec.l_min;
            kappa = rec.kappa;
        }
    }
}

#[test]
fn lds_usually_outlives_static_tree() {
    let instances = random_instances(30, 100..=100, 80.0..=80.0, Region::default(), 35);
    let wins = instances
        .iter()
        .filter(|inst| {
            let lds = run_trial(&inst.topology, &SimConfig::new(Scheduler::Lds)).unwrap();
            let wrt = run_trial(&inst.topology, &SimConfig::new(Scheduler::WrtStatic)).unwrap();
            lds.lifetime_rounds >= wrt.lifetime_rounds
        })
        .count();
    assert!(wins * 10 >= instances.len() * 8, "LDS won only {wins} of {}", instances.len());
}
