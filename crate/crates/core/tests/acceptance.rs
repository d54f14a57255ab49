//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{chain, random_instances, Instance};
use lds_core::bench::stats::{mean, median, LDS_WRT_RATIO_GATE, LDS_WRT_RATIO_REFERENCE};
use lds_core::bench::{run_sweep_with, Execution, ExperimentConfig, SweepParam, SweepRow, SweepSpec};
use lds_core::energy::{EnergyLedger, RadioParams};
use lds_core::protocol::run_distributed_build;
use lds_core::schedule::{brute_force_optimal, build_greedy_maxmin, min_expected_lifetime, WeightedGraph};
use lds_core::sim::{initial_tree, reschedule_count_model, run_trial, Scheduler, SimConfig};
use lds_core::topology::{build_topology, deploy_connected, BsPlacement, Region};

const CAMPAIGN_SEED: u64 = 0;
const STEP_BOUND_FACTOR: usize = 5;
const AUDIT_TOLERANCE: f64 = 1e-12;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Independent per-sensor cost from geometry.
fn analytic_lifetime(inst: &Instance, parents: &[usize], radio: &RadioParams, initial: f64) -> u64 {
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

fn criterion_1() -> Verdict {
    let instances = random_instances(200, 5..=50, 40.0..=100.0, Region::default(), 101);
    let mut checked = 0;
    for inst in &instances {
        for algo in [Scheduler::WrtStatic, Scheduler::Mst, Scheduler::Spt] {
            let cfg = SimConfig::new(algo);
            let g = WeightedGraph::from_topology(&inst.topology, &cfg.radio);
            let ledger = EnergyLedger::uniform(g.sensor_count(), cfg.initial_energy);
            let tree = initial_tree(&g, &ledger, algo).unwrap();
            let expected = analytic_lifetime(inst, tree.parents(), &cfg.radio, cfg.initial_energy);
            let got = run_trial(&inst.topology, &cfg).unwrap().lifetime_rounds;
            if got != expected {
                return verdict(false, format!("{algo} n={}: simulated {got}, analytic {expected}", g.sensor_count()));
            }
            checked += 1;
        }
    }
    verdict(true, format!("{checked} static trials equal floor(min RE/cost) exactly"))
}

fn criterion_2() -> Verdict {
    let instances = random_instances(100, 2..=30, 40.0..=100.0, Region::default(), 102);
    for inst in &instances {
        let g = inst.weighted();
        let ledger = EnergyLedger::uniform(g.sensor_count(), 0.25);
        let (distributed, _) = run_distributed_build(&g, &ledger).unwrap();
        let central = build_greedy_maxmin(&g, &ledger).unwrap();
        if distributed.parents() != central.parents() {
            return verdict(false, format!("parent maps differ at n={}", g.sensor_count()));
        }
    }
    verdict(true, "100 graphs: identical parent maps")
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for n in [10usize, 50, 100, 200] {
        let dep = deploy_connected(n, Region::default(), BsPlacement::Center, 103 + n as u64, 80.0, 1000).unwrap();
        let random = Instance {
            topology: build_topology(&dep, 80.0),
            deployment: dep,
            r_max: 80.0,
        };
        for (kind, inst) in [("random", random), ("chain", chain(n))] {
            let g = inst.weighted();
            let (_, trace) = run_distributed_build(&g, &EnergyLedger::uniform(n, 0.25)).unwrap();
            let ratio = trace.steps as f64 / (n * n) as f64;
            worst = worst.max(ratio);
            lines.push(format!("{kind} n={n}: {} steps", trace.steps));
            if trace.steps > STEP_BOUND_FACTOR * n * n {
                return verdict(false, format!("{kind} n={n}: {} steps > {STEP_BOUND_FACTOR}n²", trace.steps));
            }
        }
    }
    verdict(true, format!("max steps/n² = {worst:.3} ({})", lines.join(", ")))
}

fn criterion_4() -> Verdict {
    let instances = random_instances(200, 1..=8, 40.0..=100.0, Region::new(100.0, 100.0), 104);
    let mut ratios = Vec::new();
    for inst in &instances {
        let g = inst.weighted();
        let ledger = EnergyLedger::uniform(g.sensor_count(), 0.25);
        let greedy = min_expected_lifetime(&build_greedy_maxmin(&g, &ledger).unwrap(), &ledger, &g).l_min;
        let (_, optimum) = brute_force_optimal(&g, &ledger).unwrap();
        if greedy > optimum {
            return verdict(false, format!("greedy {greedy} exceeds optimum {optimum}"));
        }
        ratios.push(greedy / optimum);
    }
    let m = mean(&ratios);
    let exact = ratios.iter().filter(|&&r| r == 1.0).count();
    verdict(
        true,
        format!("greedy <= optimum on 200 graphs; mean ratio {m:.4} (informational, expected >= 0.85); optimal on {exact}"),
    )
}

fn campaign_spec() -> SweepSpec {
    SweepSpec {
        vary: SweepParam::N,
        values: vec![100.0],
        base: ExperimentConfig {
            n: 100,
            r_max: 80.0,
            trials: 100,
            algorithms: Scheduler::ALL.to_vec(),
            seed: CAMPAIGN_SEED,
            ..ExperimentConfig::default()
        },
    }
}

fn lifetimes(rows: &[SweepRow], algo: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.algo == algo)
        .map(|r| r.lifetime_rounds as f64)
        .collect()
}

fn criterion_5(rows: &[SweepRow]) -> Verdict {
    let lds = mean(&lifetimes(rows, "LDS"));
    let wrt = mean(&lifetimes(rows, "WRT"));
    let mst = mean(&lifetimes(rows, "MST"));
    let spt = mean(&lifetimes(rows, "SPT"));
    let pairs = lifetimes(rows, "LDS").len();
    let ratio = lds / wrt;
    let pass = pairs == 100 && ratio >= LDS_WRT_RATIO_GATE && lds > mst && lds > spt;
    verdict(
        pass,
        format!(
            "{pairs} paired seeds; mean LDS {lds:.1}, WRT {wrt:.1}, MST {mst:.1}, SPT {spt:.1}; LDS/WRT = {ratio:.4} (gate {LDS_WRT_RATIO_GATE}; reference {LDS_WRT_RATIO_REFERENCE} {})",
            if ratio >= LDS_WRT_RATIO_REFERENCE { "reached" } else { "not reached" }
        ),
    )
}

fn criterion_6(rows: &[SweepRow]) -> Verdict {
    let lds: Vec<&SweepRow> = rows.iter().filter(|r| r.algo == "LDS").collect();
    let in_band = lds.iter().filter(|r| (4..=14).contains(&r.reschedules)).count();
    let share = in_band as f64 / lds.len() as f64;
    let offsets: Vec<f64> = lds
        .iter()
        .map(|r| r.reschedules as f64 - reschedule_count_model(r.l_min_initial) as f64)
        .collect();
    let offset = median(&offsets);
    let counts: Vec<f64> = lds.iter().map(|r| r.reschedules as f64).collect();
    let pass = share >= 0.90 && offset.abs() <= 3.0;
    verdict(
        pass,
        format!(
            "{:.0}% of trials in [4,14]; median count {}, median(count - round(log2 L_min)) = {offset}",
            share * 100.0,
            median(&counts)
        ),
    )
}

fn criterion_7() -> Verdict {
    let spec = campaign_spec();
    let mut worst = 0.0f64;
    let mut trials = 0;
    for job in spec.jobs() {
        let cfg = spec.point(job.value);
        let dep = deploy_connected(cfg.n, cfg.region, cfg.bs, job.seed, cfg.r_max, cfg.max_attempts).unwrap();
        let topology = build_topology(&dep, cfg.r_max);
        for algo in Scheduler::ALL {
            let result = run_trial(&topology, &cfg.sim_config(algo)).unwrap();
            worst = worst.max(result.energy_audit.relative_error());
            trials += 1;
        }
    }
    verdict(
        worst <= AUDIT_TOLERANCE,
        format!("{trials} trials; worst relative audit error {worst:.3e} (tolerance {AUDIT_TOLERANCE:e})"),
    )
}

fn csv_bytes(exec: Execution) -> Vec<u8> {
    let out = run_sweep_with(&campaign_spec(), exec).unwrap();
    let mut buf = Vec::new();
    out.write_csv(&mut buf).unwrap();
    buf
}

fn criterion_8(first: &[u8]) -> Verdict {
    let again = csv_bytes(Execution::default());
    let sequential = csv_bytes(Execution::Sequential);
    let pass = again == first && sequential == first;
    verdict(
        pass,
        format!(
            "{} bytes; rerun identical: {}; sequential identical: {}",
            first.len(),
            again == first,
            sequential == first
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, run: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!(
            "[{status}] criterion {id}: {name}: {} ({:.2}s)",
            v.detail,
            start.elapsed().as_secs_f64()
        );
    };

    report(1, "analytic lifetime equality", &mut criterion_1);
    report(2, "distributed vs centralized tree", &mut criterion_2);
    report(3, "distributed step bound", &mut criterion_3);
    report(4, "tiny-instance optimality sanity", &mut criterion_4);

    let campaign = run_sweep_with(&campaign_spec(), Execution::default()).unwrap();
    let mut first = Vec::new();
    campaign.write_csv(&mut first).unwrap();
    report(5, "LDS vs baselines at n=100, range 80", &mut || criterion_5(&campaign.rows));
    report(6, "reschedule count", &mut || criterion_6(&campaign.rows));
    report(7, "energy audit", &mut criterion_7);
    report(8, "sweep determinism", &mut || criterion_8(&first));

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
