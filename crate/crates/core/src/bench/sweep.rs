//! Paired sweeps over `n` or `r_max`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::sim::{run_trial, Scheduler};
use crate::topology::{build_topology, deploy_connected};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "algo,n,r_max,seed,lifetime_rounds,reschedules,l_min_initial,kappa_initial";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    N,
    RMax,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" => Ok(SweepParam::N),
            "r_max" | "range" => Ok(SweepParam::RMax),
            other => Err(Error::Config(format!("cannot sweep over `{other}` (use n or range)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub vary: SweepParam,
    /// Values of the varied parameter; the other one comes from `base`.
    pub values: Vec<f64>,
    pub base: ExperimentConfig,
}

impl SweepSpec {
    /// Lifetime vs `n` at range 80, `n` from 40 to 200 in steps of 20.
    pub fn vary_n_default() -> Self {
        Self {
            vary: SweepParam::N,
            values: (0..9).map(|i| 40.0 + 20.0 * i as f64).collect(),
            base: ExperimentConfig {
                r_max: 80.0,
                algorithms: Scheduler::ALL.to_vec(),
                ..ExperimentConfig::default()
            },
        }
    }

    /// Lifetime vs range at `n = 100`, range from 40 to 100 in steps of 10.
    pub fn vary_range_default() -> Self {
        Self {
            vary: SweepParam::RMax,
            values: (0..7).map(|i| 40.0 + 10.0 * i as f64).collect(),
            base: ExperimentConfig {
                n: 100,
                algorithms: Scheduler::ALL.to_vec(),
                ..ExperimentConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        for &v in &self.values {
            self.point(v).validate()?;
        }
        Ok(())
    }

    /// Configuration of one sweep point.
    pub fn point(&self, value: f64) -> ExperimentConfig {
        let mut c = self.base.clone();
        match self.vary {
            SweepParam::N => c.n = value as usize,
            SweepParam::RMax => c.r_max = value,
        }
        c
    }

    /// Job list in canonical (point, trial) order.
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::with_capacity(self.values.len() * self.base.trials);
        for (point, &value) in self.values.iter().enumerate() {
            for trial in 0..self.base.trials {
                jobs.push(Job {
                    point,
                    value,
                    trial,
                    seed: trial_seed(self.base.seed, point as u64, trial as u64),
                });
            }
        }
        jobs
    }
}

/// One paired trial: a deployment shared by every algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub point: usize,
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// `splitmix64(splitmix64(splitmix64(base) ^ point) ^ trial)`.
pub fn trial_seed(base_seed: u64, point: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ point) ^ trial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algo: String,
    pub n: usize,
    pub r_max: f64,
    pub seed: u64,
    pub lifetime_rounds: u64,
    pub reschedules: usize,
    pub l_min_initial: f64,
    pub kappa_initial: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Seeds skipped because no connected deployment was found.
    pub skipped: Vec<(usize, u64)>,
    pub max_attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

enum JobOutcome {
    Rows(Vec<SweepRow>),
    Skipped(usize, u64),
}

fn run_job(spec: &SweepSpec, job: &Job) -> Result<JobOutcome> {
    let cfg = spec.point(job.value);
    let dep = match deploy_connected(cfg.n, cfg.region, cfg.bs, job.seed, cfg.r_max, cfg.max_attempts) {
        Ok(dep) => dep,
        Err(Error::ConnectivityFailure { .. }) => {
            log::warn!(
                "skipping seed {} at n={} r_max={}: no connected deployment in {} attempts",
                job.seed,
                cfg.n,
                cfg.r_max,
                cfg.max_attempts
            );
            return Ok(JobOutcome::Skipped(job.point, job.seed));
        }
        Err(e) => return Err(e),
    };
    let topology = build_topology(&dep, cfg.r_max);
    let rows = cfg
        .algorithms
        .iter()
        .map(|&algo| {
            let result = run_trial(&topology, &cfg.sim_config(algo))?;
            Ok(SweepRow {
                algo: algo.label().to_string(),
                n: cfg.n,
                r_max: cfg.r_max,
                seed: job.seed,
                lifetime_rounds: result.lifetime_rounds,
                reschedules: result.reschedule_count,
                l_min_initial: result.l_min_initial,
                kappa_initial: result.kappa_initial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JobOutcome::Rows(rows))
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    run_sweep_with(spec, Execution::default())
}

/// Runs every job; output order is canonical regardless of `exec`.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepOutput> {
    spec.validate()?;
    let jobs = spec.jobs();
    let outcomes: Vec<Result<JobOutcome>> = match exec {
        Execution::Sequential => jobs.iter().map(|j| run_job(spec, j)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(|j| run_job(spec, j)).collect()
        }
    };
    let mut out = SweepOutput {
        rows: Vec::new(),
        skipped: Vec::new(),
        max_attempts: spec.base.max_attempts,
    };
    for outcome in outcomes {
        match outcome? {
            JobOutcome::Rows(rows) => out.rows.extend(rows),
            JobOutcome::Skipped(point, seed) => out.skipped.push((point, seed)),
        }
    }
    Ok(out)
}

impl SweepOutput {
    /// Long-format CSV with a leading `#` metadata line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# connectivity: rejection-sampled, up to {} deployments per seed; {} seeds skipped",
            self.max_attempts,
            self.skipped.len()
        )?;
        let mut csv = csv::Writer::from_writer(w);
        for row in &self.rows {
            csv.serialize(row)?;
        }
        if self.rows.is_empty() {
            csv.write_record(CSV_HEADER.split(','))?;
        }
        csv.flush()?;
        Ok(())
    }
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let rows = reader.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
