// SPDX-License-Identifier: Apache-2.0

//! End-to-end generation run writing every artifact to one directory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::characterization::{
    choose_tw, classify_cells, count_flips, save_selection, select_cells, selection_csv, sweep_tw,
    SelectionRecord, SelectionThresholds, SweepPoint, TaxonomyCounts,
};
use crate::device::{ChipModel, DataPattern, Environment, TimingParams};
use crate::error::{Error, Result};
use crate::extraction::{
    condition, harvest, required_rounds, save_ascii, save_binary, sha256, to_hex, Bitstream,
    BlockParams,
};
use crate::stats::{run_battery, BatteryConfig, BatterySummary, BitSequence};
use crate::throughput::{
    throughput_csv, ThroughputInputs, ThroughputRow, REFERENCE_T_HASH_NS, REFERENCE_T_RW_NS,
};

/// Everything that determines a run besides the chip itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Seed the chip was created with; checked against the chip.
    pub seed: u64,
    pub pattern: DataPattern,
    /// Candidate write pulse widths (ns) for the sweep.
    pub tw_list: Vec<f64>,
    /// Measurements per sweep point.
    pub sweep_n: usize,
    /// Skips the sweep when set.
    pub t_w: Option<f64>,
    pub env: Environment,
    /// Characterization measurements N.
    pub n: usize,
    pub th_l: u32,
    /// Defaults to N − 1.
    pub th_u: Option<u32>,
    pub sequences: usize,
    pub sequence_bits: usize,
    pub battery: BatteryConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            pattern: DataPattern::solid(0x0000),
            tw_list: vec![15.0, 10.0, 5.0, 2.5],
            sweep_n: 10,
            t_w: None,
            env: Environment::room(),
            n: 50,
            th_l: 16,
            th_u: None,
            sequences: 20,
            sequence_bits: 100_000,
            battery: BatteryConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn thresholds(&self) -> Result<SelectionThresholds> {
        match self.th_u {
            Some(u) => SelectionThresholds::new(self.th_l, u, self.n),
            None => SelectionThresholds::lower(self.th_l, self.n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.thresholds()?;
        if self.t_w.is_none() && self.tw_list.is_empty() {
            return Err(Error::EmptySweep);
        }
        for &t in self.t_w.iter().chain(&self.tw_list) {
            TimingParams::with_write_pulse(t)?;
        }
        if self.sequences == 0 || self.sequence_bits == 0 {
            return Err(Error::InvalidConfig(
                "need at least one non-empty sequence".into(),
            ));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        to_hex(&sha256(
            serde_json::to_string(self)
                .expect("run config serializes")
                .as_bytes(),
        ))
    }
}

/// Artifact file names inside the output directory.
pub mod files {
    pub const RUN_CONFIG: &str = "run_config.json";
    pub const SWEEP: &str = "sweep.csv";
    pub const SELECTION: &str = "selection.mrsl";
    pub const SELECTION_CSV: &str = "selection.csv";
    pub const RAW: &str = "raw.bin";
    pub const RAW_META: &str = "raw.json";
    pub const CONDITIONED: &str = "conditioned.bin";
    pub const CONDITIONED_ASCII: &str = "conditioned.txt";
    pub const CONDITIONED_META: &str = "conditioned.json";
    pub const BATTERY_CSV: &str = "battery.csv";
    pub const BATTERY_TEXT: &str = "battery.txt";
    pub const THROUGHPUT_CSV: &str = "throughput.csv";
    pub const REPORT: &str = "report.json";
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub num_randcell: usize,
    pub rand_addresses: usize,
    pub rand_addr_fraction: f64,
    pub bits_per_rand_addr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config_digest: String,
    pub chip_id: String,
    pub chip_seed: u64,
    pub sweep: Vec<SweepPoint>,
    pub t_w: f64,
    pub taxonomy: TaxonomyCounts,
    pub selection: SelectionSummary,
    pub harvest_rounds: usize,
    pub raw_bits: usize,
    pub conditioned_bits: usize,
    pub battery: BatterySummary,
    pub throughput: ThroughputRow,
}

impl PipelineReport {
    pub fn verdict(&self) -> bool {
        self.battery.verdict
    }
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("t_w_ns,error_fraction\n");
    for p in points {
        s.push_str(&format!("{},{:.8}\n", p.t_w, p.error_fraction));
    }
    s
}

/// Sweep, characterize, select, harvest, condition, test and report.
///
/// Fails with [`Error::EmptySelection`] when no cell meets the thresholds. A
/// failed battery is not an error; check [`PipelineReport::verdict`].
pub fn run_pipeline(
    chip: &mut ChipModel,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<PipelineReport> {
    cfg.validate()?;
    if cfg.seed != chip.seed {
        return Err(Error::InvalidConfig(format!(
            "run seed {} does not match chip seed {}",
            cfg.seed, chip.seed
        )));
    }
    std::fs::create_dir_all(out_dir)?;
    write(
        out_dir,
        files::RUN_CONFIG,
        serde_json::to_string_pretty(cfg).expect("run config serializes"),
    )?;

    let sweep = match cfg.t_w {
        Some(_) => Vec::new(),
        None => sweep_tw(chip, &cfg.pattern, &cfg.tw_list, &cfg.env, cfg.sweep_n)?,
    };
    let t_w = match cfg.t_w {
        Some(t) => t,
        None => choose_tw(&sweep)?,
    };
    write(out_dir, files::SWEEP, sweep_csv(&sweep))?;
    log::info!("write pulse {t_w} ns");

    let timing = TimingParams::with_write_pulse(t_w)?;
    let m = chip.measure(&cfg.pattern, &timing, &cfg.env, cfg.n)?;
    let taxonomy = classify_cells(&m).counts();
    let fc = count_flips(&m);
    drop(m);
    let thresholds = cfg.thresholds()?;
    let sel = select_cells(&fc, thresholds)?;
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    let record = SelectionRecord {
        selection: sel,
        n_measurements: cfg.n,
        thresholds,
    };
    save_selection(&record, out_dir.join(files::SELECTION))?;
    write(
        out_dir,
        files::SELECTION_CSV,
        selection_csv(&record.selection, &fc)?,
    )?;
    let sel = record.selection;
    log::info!(
        "{} cells selected over {} addresses",
        sel.num_randcell,
        sel.num_rand_addresses()
    );

    let params = BlockParams::default();
    let target = cfg.sequences * cfg.sequence_bits;
    let rounds = required_rounds(target.max(params.d_len), &sel, params)?;
    let raw = harvest(chip, &sel, &cfg.pattern, t_w, &cfg.env, rounds)?;
    let conditioned = condition(&raw, params)?;
    save_stream(out_dir, &raw, files::RAW, None, files::RAW_META)?;
    save_stream(
        out_dir,
        &conditioned,
        files::CONDITIONED,
        Some(files::CONDITIONED_ASCII),
        files::CONDITIONED_META,
    )?;

    let mut seqs = BitSequence::split(&conditioned.bits, cfg.sequence_bits)?;
    seqs.truncate(cfg.sequences);
    let battery = run_battery(&seqs, &cfg.battery)?;
    write(out_dir, files::BATTERY_CSV, battery.to_csv())?;
    write(out_dir, files::BATTERY_TEXT, battery.to_table())?;

    let bits = sel.bits_per_rand_addr.ok_or(Error::EmptySelection)?;
    let throughput = ThroughputRow::new(
        &chip.chip_id,
        ThroughputInputs::new(REFERENCE_T_RW_NS, REFERENCE_T_HASH_NS, bits)?,
    )?;
    write(
        out_dir,
        files::THROUGHPUT_CSV,
        throughput_csv(std::slice::from_ref(&throughput)),
    )?;

    let report = PipelineReport {
        config_digest: cfg.digest(),
        chip_id: chip.chip_id.clone(),
        chip_seed: chip.seed,
        sweep,
        t_w,
        taxonomy,
        selection: SelectionSummary {
            num_randcell: sel.num_randcell,
            rand_addresses: sel.num_rand_addresses(),
            rand_addr_fraction: sel.rand_addr_fraction,
            bits_per_rand_addr: sel.bits_per_rand_addr,
        },
        harvest_rounds: rounds,
        raw_bits: raw.len(),
        conditioned_bits: conditioned.len(),
        battery,
        throughput,
    };
    write(
        out_dir,
        files::REPORT,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

fn save_stream(
    dir: &Path,
    stream: &Bitstream,
    bin: &str,
    ascii: Option<&str>,
    meta: &str,
) -> Result<()> {
    save_binary(&stream.bits, dir.join(bin))?;
    if let Some(a) = ascii {
        save_ascii(&stream.bits, dir.join(a))?;
    }
    write(dir, meta, stream.metadata_json())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{create_chip, ChipConfig};

    fn small() -> RunConfig {
        RunConfig {
            seed: 3,
            sequences: 4,
            sequence_bits: 1024,
            ..RunConfig::default()
        }
    }

    #[test]
    fn config_round_trips_and_digests() {
        let cfg = RunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
        let other = RunConfig {
            seed: 2,
            ..cfg.clone()
        };
        assert_ne!(other.digest(), cfg.digest());
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = RunConfig {
            th_l: 50,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let empty = RunConfig {
            tw_list: vec![],
            ..RunConfig::default()
        };
        assert!(matches!(empty.validate(), Err(Error::EmptySweep)));
    }

    #[test]
    fn small_run_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut chip = create_chip(&ChipConfig::default().with_addresses(4096), 3).unwrap();
        let report = run_pipeline(&mut chip, &small(), dir.path()).unwrap();
        assert_eq!(report.t_w, 2.5);
        assert_eq!(report.conditioned_bits, 4096);
        for f in [
            files::RUN_CONFIG,
            files::SWEEP,
            files::SELECTION,
            files::SELECTION_CSV,
            files::RAW,
            files::CONDITIONED,
            files::CONDITIONED_ASCII,
            files::BATTERY_CSV,
            files::THROUGHPUT_CSV,
            files::REPORT,
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn seed_must_match_chip() {
        let dir = tempfile::tempdir().unwrap();
        let mut chip = create_chip(&ChipConfig::default().with_addresses(64), 4).unwrap();
        assert!(matches!(
            run_pipeline(&mut chip, &small(), dir.path()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn unreachable_threshold_is_empty_selection() {
        let dir = tempfile::tempdir().unwrap();
        let mut chip = create_chip(&ChipConfig::default().with_addresses(256), 3).unwrap();
        let cfg = RunConfig {
            th_l: 49,
            ..small()
        };
        assert!(matches!(
            run_pipeline(&mut chip, &cfg, dir.path()),
            Err(Error::EmptySelection)
        ));
    }
}
