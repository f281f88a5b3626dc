// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::cusum::{cumulative_sums, CusumMode};
use crate::stats::frequency::{block_frequency, frequency_monobit};
use crate::stats::runs::{longest_run, runs};
use crate::stats::sequence::{BitSequence, DEFAULT_ALPHA};
use crate::stats::special::igamc;
use crate::stats::templates::{approximate_entropy, serial};

/// Row labels in report order.
pub const BATTERY_ROWS: [&str; 9] = [
    "Frequency",
    "BlockFrequency",
    "CumulativeSums (fwd)",
    "CumulativeSums (rev)",
    "Runs",
    "LongestRun",
    "Serial (1)",
    "Serial (2)",
    "ApproximateEntropy",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryConfig {
    pub alpha: f64,
    pub block_frequency_m: usize,
    /// `None` picks `min(16, ⌊log₂ n⌋ − 3)`.
    pub serial_m: Option<usize>,
    /// `None` picks `min(10, ⌊log₂ n⌋ − 6)`.
    pub apen_m: Option<usize>,
    /// Smallest acceptable uniformity p-value.
    pub uniformity_floor: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            block_frequency_m: 128,
            serial_m: None,
            apen_m: None,
            uniformity_floor: 0.0001,
        }
    }
}

impl BatteryConfig {
    fn log2_floor(n: usize) -> usize {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }

    pub fn serial_width(&self, n: usize) -> usize {
        self.serial_m
            .unwrap_or_else(|| Self::log2_floor(n).saturating_sub(3).clamp(2, 16))
    }

    pub fn apen_width(&self, n: usize) -> usize {
        self.apen_m
            .unwrap_or_else(|| Self::log2_floor(n).saturating_sub(6).clamp(1, 10))
    }

    /// Minimum passing proportion for `s` sequences.
    pub fn proportion_threshold(&self, s: usize) -> f64 {
        let a = self.alpha;
        (1.0 - a) - 3.0 * (a * (1.0 - a) / s as f64).sqrt()
    }

    /// Minimum number of passing sequences out of `s`.
    pub fn min_passes(&self, s: usize) -> usize {
        (self.proportion_threshold(s) * s as f64).floor().max(0.0) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub test_name: String,
    pub p_values: Vec<f64>,
    /// χ² uniformity of the p-values over ten equal bins.
    pub uniformity_p: f64,
    pub passes: usize,
    pub total: usize,
    pub min_passes: usize,
    pub passed: bool,
}

impl BatteryRow {
    pub fn proportion(&self) -> String {
        format!("{}/{}", self.passes, self.total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatterySummary {
    pub config: BatteryConfig,
    pub sequence_length: usize,
    pub rows: Vec<BatteryRow>,
    pub verdict: bool,
}

/// χ² uniformity over ten bins, `Q(9/2, χ²/2)`.
pub fn uniformity_p(p_values: &[f64]) -> f64 {
    let mut bins = [0usize; 10];
    for &p in p_values {
        bins[((p * 10.0).floor() as usize).min(9)] += 1;
    }
    let e = p_values.len() as f64 / 10.0;
    let chi2: f64 = bins.iter().map(|&f| (f as f64 - e).powi(2) / e).sum();
    igamc(4.5, chi2 / 2.0)
}

fn sequence_p_values(seq: &BitSequence, cfg: &BatteryConfig) -> Result<[f64; 9]> {
    let n = seq.len();
    let [s1, s2] = serial::<f64>(seq, cfg.serial_width(n))?;
    Ok([
        frequency_monobit::<f64>(seq).p_value,
        block_frequency::<f64>(seq, cfg.block_frequency_m)?.p_value,
        cumulative_sums::<f64>(seq, CusumMode::Forward).p_value,
        cumulative_sums::<f64>(seq, CusumMode::Reverse).p_value,
        runs::<f64>(seq).p_value,
        longest_run::<f64>(seq)?.p_value,
        s1.p_value,
        s2.p_value,
        approximate_entropy::<f64>(seq, cfg.apen_width(n))?.p_value,
    ])
}

/// Runs every core test on every sequence and applies the proportion and
/// uniformity rules.
pub fn run_battery(seqs: &[BitSequence], cfg: &BatteryConfig) -> Result<BatterySummary> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::InvalidParameter("battery needs at least one sequence".into()))?
        .len();
    if let Some(other) = seqs.iter().map(BitSequence::len).find(|&l| l != first) {
        return Err(Error::MixedLengths { first, other });
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha {} outside (0, 1)",
            cfg.alpha
        )));
    }
    let per_seq = seqs
        .par_iter()
        .map(|s| sequence_p_values(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let s = seqs.len();
    let min_passes = cfg.min_passes(s);
    let rows: Vec<BatteryRow> = BATTERY_ROWS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let p_values: Vec<f64> = per_seq.iter().map(|ps| ps[i]).collect();
            let passes = p_values.iter().filter(|&&p| p >= cfg.alpha).count();
            let uniformity_p = uniformity_p(&p_values);
            BatteryRow {
                test_name: (*name).to_owned(),
                passed: passes >= min_passes && uniformity_p >= cfg.uniformity_floor,
                p_values,
                uniformity_p,
                passes,
                total: s,
                min_passes,
            }
        })
        .collect();
    Ok(BatterySummary {
        config: *cfg,
        sequence_length: first,
        verdict: rows.iter().all(|r| r.passed),
        rows,
    })
}

impl BatterySummary {
    pub fn row(&self, name: &str) -> Option<&BatteryRow> {
        self.rows.iter().find(|r| r.test_name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("test,p_uniformity,proportion,pass\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{:.6},{},{}",
                r.test_name,
                r.uniformity_p,
                r.proportion(),
                if r.passed { "PASS" } else { "FAIL" }
            )
            .unwrap();
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{} sequences of {} bits, alpha = {}, minimum pass count {}",
            self.rows.first().map_or(0, |r| r.total),
            self.sequence_length,
            self.config.alpha,
            self.rows.first().map_or(0, |r| r.min_passes),
        )
        .unwrap();
        writeln!(s, "{:<24} {:>10} {:>8}  Result", "Test", "P-val.", "Prop.").unwrap();
        writeln!(s, "{}", "-".repeat(54)).unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:<24} {:>10.6} {:>8}  {}",
                r.test_name,
                r.uniformity_p,
                r.proportion(),
                if r.passed { "Success" } else { "Failure" }
            )
            .unwrap();
        }
        writeln!(s, "verdict: {}", if self.verdict { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_sequences_need_eighteen() {
        let cfg = BatteryConfig::default();
        assert_eq!(cfg.min_passes(20), 18);
        assert!((cfg.proportion_threshold(20) - 0.923_254_213_616_139).abs() < 1e-12);
    }

    #[test]
    fn auto_widths() {
        let cfg = BatteryConfig::default();
        assert_eq!(cfg.serial_width(100_000), 13);
        assert_eq!(cfg.apen_width(100_000), 10);
        assert_eq!(cfg.serial_width(1_000_000), 16);
        assert_eq!(cfg.serial_width(128), 4);
        assert_eq!(cfg.apen_width(128), 1);
    }

    #[test]
    fn uniform_p_values() {
        let ps: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((uniformity_p(&ps) - 1.0).abs() < 1e-12);
        assert!(uniformity_p(&[0.05; 20]) < 1e-6);
        assert_eq!(uniformity_p(&[1.0]), uniformity_p(&[0.95]));
    }

    #[test]
    fn mixed_lengths_rejected() {
        let a = BitSequence::new(vec![true; 200]).unwrap();
        let b = BitSequence::new(vec![true; 201]).unwrap();
        assert!(matches!(
            run_battery(&[a, b], &BatteryConfig::default()),
            Err(Error::MixedLengths { .. })
        ));
        assert!(run_battery(&[], &BatteryConfig::default()).is_err());
    }

    #[test]
    fn zero_streams_fail_monobit() {
        let z = BitSequence::new(vec![false; 1000]).unwrap();
        let seqs = vec![z; 20];
        let sum = run_battery(&seqs, &BatteryConfig::default()).unwrap();
        let f = sum.row("Frequency").unwrap();
        assert_eq!(f.proportion(), "0/20");
        assert!(!sum.verdict);
        assert!(sum.to_csv().contains("Frequency,"));
        assert!(sum.to_table().contains("verdict: FAIL"));
    }
}
