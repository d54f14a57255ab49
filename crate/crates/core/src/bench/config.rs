//! Flat `key = value` experiment configuration.

use std::collections::HashMap;
use std::path::Path;

use crate::energy::EnergySettings;
use crate::sim::{Scheduler, SimConfig, DEFAULT_MAX_ROUNDS, DEFAULT_PIGGYBACK_OVERHEAD};
use crate::topology::{BsPlacement, Region, DEFAULT_MAX_ATTEMPTS};
use crate::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "n",
    "range",
    "region_width",
    "region_height",
    "bs",
    "seed",
    "max_attempts",
    "algo",
    "trials",
    "piggyback_overhead",
    "charge_build_messages",
    "max_rounds",
];

/// Everything needed to run one trial or one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub r_max: f64,
    pub region: Region,
    pub bs: BsPlacement,
    pub seed: u64,
    pub max_attempts: usize,
    pub algorithms: Vec<Scheduler>,
    pub trials: usize,
    pub energy: EnergySettings,
    pub piggyback_overhead: f64,
    pub charge_build_messages: bool,
    pub max_rounds: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 100,
            r_max: 80.0,
            region: Region::default(),
            bs: BsPlacement::Center,
            seed: 0,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            algorithms: vec![Scheduler::Lds],
            trials: 100,
            energy: EnergySettings::default(),
            piggyback_overhead: DEFAULT_PIGGYBACK_OVERHEAD,
            charge_build_messages: false,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

impl ExperimentConfig {
    pub fn sim_config(&self, scheduler: Scheduler) -> SimConfig {
        SimConfig {
            scheduler,
            piggyback_overhead: self.piggyback_overhead,
            radio: self.energy.radio,
            initial_energy: self.energy.initial_energy_j,
            charge_build_messages: self.charge_build_messages,
            max_rounds: self.max_rounds,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_kv(&parse_kv(&text)?)
    }

    pub fn from_kv(kv: &HashMap<String, String>) -> Result<Self> {
        for key in kv.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) && !EnergySettings::KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key `{key}`")));
            }
        }
        let mut c = Self {
            energy: EnergySettings::from_kv(kv)?,
            ..Self::default()
        };
        if let Some(v) = kv.get("n") {
            c.n = parse_num("n", v)?;
        }
        if let Some(v) = kv.get("range") {
            c.r_max = parse_num("range", v)?;
        }
        if let Some(v) = kv.get("region_width") {
            c.region.width = parse_num("region_width", v)?;
        }
        if let Some(v) = kv.get("region_height") {
            c.region.height = parse_num("region_height", v)?;
        }
        if let Some(v) = kv.get("bs") {
            c.bs = v.parse()?;
        }
        if let Some(v) = kv.get("seed") {
            c.seed = parse_num("seed", v)?;
        }
        if let Some(v) = kv.get("max_attempts") {
            c.max_attempts = parse_num("max_attempts", v)?;
        }
        if let Some(v) = kv.get("algo") {
            c.algorithms = parse_algorithms(v)?;
        }
        if let Some(v) = kv.get("trials") {
            c.trials = parse_num("trials", v)?;
        }
        if let Some(v) = kv.get("piggyback_overhead") {
            c.piggyback_overhead = parse_num("piggyback_overhead", v)?;
        }
        if let Some(v) = kv.get("charge_build_messages") {
            c.charge_build_messages = parse_num("charge_build_messages", v)?;
        }
        if let Some(v) = kv.get("max_rounds") {
            c.max_rounds = parse_num("max_rounds", v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.n == 0 {
            return fail("n must be at least 1");
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return fail("range must be positive");
        }
        if !(self.region.width > 0.0 && self.region.height > 0.0) {
            return fail("region dimensions must be positive");
        }
        if self.max_attempts == 0 {
            return fail("max_attempts must be at least 1");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required");
        }
        if !(self.piggyback_overhead >= 0.0 && self.piggyback_overhead.is_finite()) {
            return fail("piggyback_overhead must be non-negative");
        }
        Ok(())
    }
}

/// Comma-separated algorithm list, e.g. `lds,wrt,mst,spt` or `all`.
pub fn parse_algorithms(s: &str) -> Result<Vec<Scheduler>> {
    if s.trim() == "all" {
        return Ok(Scheduler::ALL.to_vec());
    }
    let mut out: Vec<Scheduler> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let algo: Scheduler = part.parse()?;
        if !out.contains(&algo) {
            out.push(algo);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty algorithm list".into()));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<HashMap<String, String>> {
    let mut kv = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        kv.insert(key.to_string(), v.trim().to_string());
    }
    Ok(kv)
}
