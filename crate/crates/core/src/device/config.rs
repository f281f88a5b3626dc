// SPDX-License-Identifier: Apache-2.0

//! Chip population configuration.
//!
//! A chip is sampled hierarchically. Each 16-bit word draws a switching
//! threshold offset, a switching slope class (steep or weak) and a failure
//! class (sticky or recovering); each cell then adds small jitter to the
//! threshold and slope and draws its metastable readout behaviour.
//!
//! Steep words switch deterministically on either side of their threshold.
//! Weak words have a shallow logistic slope and produce the temporally
//! random cells. Failed toggles in sticky cells almost always keep the old
//! value; in recovering cells they almost always resolve to logic 0.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "{what}: beta parameters must be positive, got ({}, {})",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

/// Switching threshold `tau` (ns) = mean + word offset + cell jitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDist {
    pub mean_ns: f64,
    pub word_sigma_ns: f64,
    pub cell_sigma_ns: f64,
    /// Lower truncation bound.
    pub min_ns: f64,
}

/// Switching slope (1/ns), log-normal per word around one of two medians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteepnessDist {
    pub strong_median: f64,
    pub weak_median: f64,
    pub weak_word_fraction: f64,
    pub word_log_sigma: f64,
    pub cell_log_sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetastableDist {
    pub recovering_word_fraction: f64,
    pub recovering_cell_fraction: f64,
    pub sticky_frac: BetaParams,
    pub sticky_bias: BetaParams,
    pub recovering_frac: BetaParams,
    pub recovering_bias: BetaParams,
}

/// Environment response of the switching threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvCoeffs {
    /// Threshold increase per °C below the reference temperature (ns/°C).
    pub temp_tau_slope: f64,
    /// External fields at or below this magnitude have no effect (mT).
    pub field_threshold_mt: f64,
}

impl Default for EnvCoeffs {
    fn default() -> Self {
        Self {
            temp_tau_slope: 0.05,
            field_threshold_mt: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChipConfig {
    pub chip_id: String,
    pub num_addresses: usize,
    /// Used when no seed is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub threshold: ThresholdDist,
    pub steepness: SteepnessDist,
    pub metastable: MetastableDist,
    #[serde(default)]
    pub env_coeffs: EnvCoeffs,
}

fn unit_interval(v: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidConfig(format!(
            "{what} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

fn positive(v: f64, what: &str) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "{what} must be positive, got {v}"
        )));
    }
    Ok(())
}

impl ChipConfig {
    /// 1 Mb part (65536 × 16) with the default calibration.
    pub fn default_1mb() -> Self {
        Self {
            chip_id: "default".into(),
            num_addresses: 65_536,
            seed: None,
            threshold: ThresholdDist {
                mean_ns: 3.0,
                word_sigma_ns: 0.9,
                cell_sigma_ns: 0.01,
                min_ns: 0.05,
            },
            steepness: SteepnessDist {
                strong_median: 5000.0,
                weak_median: 0.8,
                weak_word_fraction: 0.02,
                word_log_sigma: 0.3,
                cell_log_sigma: 0.05,
            },
            metastable: MetastableDist {
                recovering_word_fraction: 0.52,
                recovering_cell_fraction: 0.08,
                sticky_frac: BetaParams::new(40.0, 760.0),
                sticky_bias: BetaParams::new(2.0, 2.0),
                recovering_frac: BetaParams::new(400.0, 8.0),
                recovering_bias: BetaParams::new(2.0, 200.0),
            },
            env_coeffs: EnvCoeffs::default(),
        }
    }

    pub fn with_addresses(mut self, num_addresses: usize) -> Self {
        self.num_addresses = num_addresses;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_addresses == 0 {
            return Err(Error::InvalidConfig("num_addresses must be > 0".into()));
        }
        if self.num_addresses > u32::MAX as usize {
            return Err(Error::InvalidConfig("num_addresses exceeds 2^32".into()));
        }
        let t = &self.threshold;
        positive(t.mean_ns, "threshold.mean_ns")?;
        positive(t.word_sigma_ns, "threshold.word_sigma_ns")?;
        positive(t.cell_sigma_ns, "threshold.cell_sigma_ns")?;
        positive(t.min_ns, "threshold.min_ns")?;
        let s = &self.steepness;
        positive(s.strong_median, "steepness.strong_median")?;
        positive(s.weak_median, "steepness.weak_median")?;
        positive(s.word_log_sigma, "steepness.word_log_sigma")?;
        positive(s.cell_log_sigma, "steepness.cell_log_sigma")?;
        unit_interval(s.weak_word_fraction, "steepness.weak_word_fraction")?;
        let m = &self.metastable;
        unit_interval(
            m.recovering_word_fraction,
            "metastable.recovering_word_fraction",
        )?;
        unit_interval(
            m.recovering_cell_fraction,
            "metastable.recovering_cell_fraction",
        )?;
        m.sticky_frac.validate("metastable.sticky_frac")?;
        m.sticky_bias.validate("metastable.sticky_bias")?;
        m.recovering_frac.validate("metastable.recovering_frac")?;
        m.recovering_bias.validate("metastable.recovering_bias")?;
        let e = &self.env_coeffs;
        if !e.temp_tau_slope.is_finite() {
            return Err(Error::InvalidConfig(
                "env_coeffs.temp_tau_slope must be finite".into(),
            ));
        }
        if !(e.field_threshold_mt >= 0.0 && e.field_threshold_mt.is_finite()) {
            return Err(Error::InvalidConfig(
                "env_coeffs.field_threshold_mt must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ChipConfig = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("chip config serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

impl Default for ChipConfig {
    fn default() -> Self {
        Self::default_1mb()
    }
}

/// A shipped calibration together with the lower selection threshold it is
/// meant to be characterized with.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub th_l: u32,
    pub config: ChipConfig,
}

fn variant(name: &str, weak_fraction: f64, weak_median: f64, recovering_cells: f64) -> ChipConfig {
    let mut c = ChipConfig::default_1mb();
    c.chip_id = name.into();
    c.steepness.weak_word_fraction = weak_fraction;
    c.steepness.weak_median = weak_median;
    c.metastable.recovering_cell_fraction = recovering_cells;
    c
}

/// Calibrations mimicking the five characterized parts (C1..C5).
pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "c1",
            th_l: 16,
            config: variant("c1", 0.022, 1.0, 0.12),
        },
        Preset {
            name: "c2",
            th_l: 16,
            config: variant("c2", 0.028, 0.8, 0.08),
        },
        Preset {
            name: "c3",
            th_l: 15,
            config: variant("c3", 0.020, 0.5, 0.02),
        },
        Preset {
            name: "c4",
            th_l: 23,
            config: variant("c4", 0.013, 0.25, 0.02),
        },
        Preset {
            name: "c5",
            th_l: 21,
            config: variant("c5", 0.018, 0.3, 0.02),
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    if name == "default" {
        return Some(Preset {
            name: "default",
            th_l: 16,
            config: ChipConfig::default_1mb(),
        });
    }
    presets().into_iter().find(|p| p.name == name)
}
