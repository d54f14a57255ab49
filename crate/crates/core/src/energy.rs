//! First-order radio cost model and per-sensor residual energy.

use std::collections::HashMap;

use crate::{Error, NodeId, Result};

/// Radio constants in SI units: joules per bit, joules per bit per square
/// meter, and bits per packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub eps_elec: f64,
    pub eps_amp: f64,
    pub packet_bits: u64,
}

impl RadioParams {
    /// 50 nJ/bit electronics, 100 pJ/bit/m² amplifier, 2000-bit packets.
    pub const fn standard() -> Self {
        Self {
            eps_elec: 50e-9,
            eps_amp: 100e-12,
            packet_bits: 2000,
        }
    }

    pub fn from_units(eps_elec_nj_per_bit: f64, eps_amp_pj_per_bit_m2: f64, packet_bits: u64) -> Self {
        Self {
            eps_elec: eps_elec_nj_per_bit / 1e9,
            eps_amp: eps_amp_pj_per_bit_m2 / 1e12,
            packet_bits,
        }
    }

    pub fn rx_cost(&self) -> f64 {
        self.eps_elec * self.packet_bits as f64
    }

    pub fn tx_cost(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0);
        self.rx_cost() + self.eps_amp * self.packet_bits as f64 * d * d
    }

    /// Link weight `w_ij`: the cost to push one packet across distance `d`.
    pub fn edge_weight(&self, d: f64) -> f64 {
        self.tx_cost(d)
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        Self::standard()
    }
}

pub const DEFAULT_INITIAL_ENERGY_J: f64 = 0.25;

/// Radio constants plus the battery every sensor starts with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySettings {
    pub radio: RadioParams,
    pub initial_energy_j: f64,
}

impl Default for EnergySettings {
    fn default() -> Self {
        Self {
            radio: RadioParams::standard(),
            initial_energy_j: DEFAULT_INITIAL_ENERGY_J,
        }
    }
}

impl EnergySettings {
    pub const KEYS: [&'static str; 4] = [
        "eps_elec_nj_per_bit",
        "eps_amp_pj_per_bit_m2",
        "packet_bits",
        "initial_energy_j",
    ];

    /// Reads the energy keys from a flat key=value map; unknown keys are
    /// left for other consumers and missing keys keep their defaults.
    pub fn from_kv(kv: &HashMap<String, String>) -> Result<Self> {
        let mut s = Self::default();
        let mut elec = 50.0;
        let mut amp = 100.0;
        let mut bits = s.radio.packet_bits;
        if let Some(v) = kv.get("eps_elec_nj_per_bit") {
            elec = parse_non_negative("eps_elec_nj_per_bit", v)?;
        }
        if let Some(v) = kv.get("eps_amp_pj_per_bit_m2") {
            amp = parse_non_negative("eps_amp_pj_per_bit_m2", v)?;
        }
        if let Some(v) = kv.get("packet_bits") {
            bits = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("packet_bits: not an integer: `{v}`")))?;
        }
        if let Some(v) = kv.get("initial_energy_j") {
            s.initial_energy_j = parse_non_negative("initial_energy_j", v)?;
        }
        s.radio = RadioParams::from_units(elec, amp, bits);
        Ok(s)
    }
}

fn parse_non_negative(key: &str, v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(f) if f.is_finite() && f >= 0.0 => Ok(f),
        _ => Err(Error::Config(format!("{key}: expected a non-negative number, got `{v}`"))),
    }
}

/// Residual energy per sensor. The base station is mains-powered and has no
/// entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    residual: Vec<f64>,
    initial: f64,
    drained: CompensatedSum,
}

impl EnergyLedger {
    pub fn uniform(n: usize, initial: f64) -> Self {
        assert!(initial >= 0.0 && initial.is_finite());
        Self {
            residual: vec![initial; n],
            initial,
            drained: CompensatedSum::default(),
        }
    }

    /// Ledger with arbitrary starting residuals, each at most `initial`.
    pub fn with_residuals(initial: f64, residual: Vec<f64>) -> Self {
        assert!(
            residual.iter().all(|&r| (0.0..=initial).contains(&r)),
            "residuals must lie in [0, initial]"
        );
        let mut drained = CompensatedSum::default();
        for &r in &residual {
            drained.add(initial - r);
        }
        Self {
            residual,
            initial,
            drained,
        }
    }

    pub fn sensor_count(&self) -> usize {
        self.residual.len()
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn residual(&self, node: NodeId) -> f64 {
        self.residual[node]
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residual
    }

    pub fn drained_total(&self) -> f64 {
        self.drained.value()
    }

    /// Takes `amount` from `node`, or fails without touching anything.
    pub fn drain(&mut self, node: NodeId, amount: f64) -> Result<()> {
        debug_assert!(amount >= 0.0);
        let residual = self.residual[node];
        if residual < amount {
            return Err(Error::InsufficientEnergy {
                node,
                residual,
                required: amount,
            });
        }
        self.residual[node] = residual - amount;
        self.drained.add(amount);
        Ok(())
    }

    /// `n × initial − Σ residual`, for auditing against `drained_total`.
    pub fn consumed_from_residuals(&self) -> f64 {
        let mut sum = CompensatedSum::default();
        for &r in &self.residual {
            sum.add(r);
        }
        self.initial * self.residual.len() as f64 - sum.value()
    }
}

/// Neumaier summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
