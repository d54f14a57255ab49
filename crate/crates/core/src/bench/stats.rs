//! Summary statistics over sweep CSV rows.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::sweep::SweepRow;

/// Threshold the LDS/WRT paired ratio is gated on.
pub const LDS_WRT_RATIO_GATE: f64 = 1.15;
/// Improvement level reported for reference.
pub const LDS_WRT_RATIO_REFERENCE: f64 = 1.25;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub algo: String,
    pub n: usize,
    pub r_max: f64,
    pub trials: usize,
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedRatio {
    pub n: usize,
    pub r_max: f64,
    pub pairs: usize,
    /// mean(LDS) / mean(WRT) over seeds that have both.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub points: Vec<PointSummary>,
    pub ratios: Vec<PairedRatio>,
    pub overall_ratio: Option<f64>,
    /// LDS reschedule count → number of trials.
    pub reschedule_histogram: BTreeMap<usize, usize>,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// Point key that orders by `(n, r_max)`.
fn point_key(row: &SweepRow) -> (usize, u64) {
    (row.n, row.r_max.to_bits())
}

fn algo_rank(algo: &str) -> usize {
    ["LDS", "WRT", "MST", "SPT"]
        .iter()
        .position(|a| *a == algo)
        .unwrap_or(usize::MAX)
}

pub fn summarize(rows: &[SweepRow]) -> Summary {
    let mut groups: BTreeMap<((usize, u64), usize, String), Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((point_key(row), algo_rank(&row.algo), row.algo.clone()))
            .or_default()
            .push(row.lifetime_rounds as f64);
    }
    let points = groups
        .into_iter()
        .map(|(((n, r_bits), _, algo), xs)| PointSummary {
            algo,
            n,
            r_max: f64::from_bits(r_bits),
            trials: xs.len(),
            mean: mean(&xs),
            stddev: stddev(&xs),
            median: median(&xs),
        })
        .collect();

    // Pair LDS with WRT on (point, seed).
    let mut wrt: HashMap<((usize, u64), u64), f64> = HashMap::new();
    for row in rows.iter().filter(|r| r.algo == "WRT") {
        wrt.insert((point_key(row), row.seed), row.lifetime_rounds as f64);
    }
    let mut pairs: BTreeMap<(usize, u64), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.algo == "LDS") {
        if let Some(&w) = wrt.get(&(point_key(row), row.seed)) {
            let entry = pairs.entry(point_key(row)).or_default();
            entry.0.push(row.lifetime_rounds as f64);
            entry.1.push(w);
        }
    }
    let ratios = pairs
        .iter()
        .map(|(&(n, r_bits), (lds, w))| PairedRatio {
            n,
            r_max: f64::from_bits(r_bits),
            pairs: lds.len(),
            ratio: mean(lds) / mean(w),
        })
        .collect();
    let (all_lds, all_wrt): (Vec<f64>, Vec<f64>) = pairs
        .values()
        .flat_map(|(l, w)| l.iter().copied().zip(w.iter().copied()))
        .unzip();
    let overall_ratio = (!all_lds.is_empty()).then(|| mean(&all_lds) / mean(&all_wrt));

    let mut reschedule_histogram = BTreeMap::new();
    for row in rows.iter().filter(|r| r.algo == "LDS") {
        *reschedule_histogram.entry(row.reschedules).or_insert(0) += 1;
    }

    Summary {
        points,
        ratios,
        overall_ratio,
        reschedule_histogram,
    }
}

impl Summary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:>5} {:>7} {:>6} {:>10} {:>10} {:>10}",
            "algo", "n", "r_max", "trials", "mean", "stddev", "median"
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:<5} {:>5} {:>7} {:>6} {:>10.1} {:>10.1} {:>10.1}",
                p.algo, p.n, p.r_max, p.trials, p.mean, p.stddev, p.median
            );
        }
        if !self.ratios.is_empty() {
            let _ = writeln!(s, "\nLDS/WRT paired mean ratio");
            for r in &self.ratios {
                let _ = writeln!(s, "  n={:<4} r_max={:<6} pairs={:<4} ratio={:.4}", r.n, r.r_max, r.pairs, r.ratio);
            }
        }
        if let Some(r) = self.overall_ratio {
            let _ = writeln!(
                s,
                "  overall ratio={r:.4} (gate {LDS_WRT_RATIO_GATE}, reference {LDS_WRT_RATIO_REFERENCE}): {}",
                if r >= LDS_WRT_RATIO_GATE { "meets gate" } else { "below gate" }
            );
        }
        if !self.reschedule_histogram.is_empty() {
            let _ = writeln!(s, "\nLDS reschedule counts");
            for (count, trials) in &self.reschedule_histogram {
                let _ = writeln!(s, "  {count:>3}: {trials}");
            }
        }
        s
    }
}
