// SPDX-License-Identifier: Apache-2.0

//! Behavioural toggle-MRAM array.
//!
//! Writes pre-read each bit and only pulse the cells whose value must change.
//! A pulse shorter than the cell's switching threshold may fail; a failed
//! toggle either keeps the old value or, with the cell's metastable
//! probability, lands between the resistance states and reads back as a
//! biased coin.

use std::ops::Range;

use rand_distr::{Beta, Distribution, LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characterization::matrix::{pack_words, words_for, MeasurementMatrix, WORD_BITS};
use crate::device::config::{ChipConfig, EnvCoeffs};
use crate::device::environment::{Environment, T_REF_C};
use crate::device::pattern::DataPattern;
use crate::device::timing::{TimingParams, NOMINAL_T_W};
use crate::error::{Error, Result};
use crate::rng::{self, CounterRng};

/// Bounds applied to sampled switching slopes (1/ns).
const STEEPNESS_RANGE: (f64, f64) = (1e-3, 1e6);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub tau_ns: f64,
    pub steepness: f64,
    pub metastable_frac: f64,
    pub metastable_bias: f64,
}

impl CellParams {
    /// Effective switching threshold under `env`.
    #[inline]
    pub fn tau_eff(&self, coeffs: &EnvCoeffs, env: &Environment) -> f64 {
        let mut tau = self.tau_ns + coeffs.temp_tau_slope * (T_REF_C - env.temperature_c);
        if env.field_mt > coeffs.field_threshold_mt {
            tau += FIELD_TAU_SLOPE * (env.field_mt - coeffs.field_threshold_mt);
        }
        tau
    }

    /// Probability that a required toggle completes within `t_w`.
    #[inline]
    pub fn toggle_probability(&self, t_w: f64, coeffs: &EnvCoeffs, env: &Environment) -> f64 {
        if t_w >= NOMINAL_T_W {
            return 1.0;
        }
        let x = self.steepness * (t_w - self.tau_eff(coeffs, env));
        1.0 / (1.0 + (-x).exp())
    }

    /// Probability that a write needing a toggle away from `stored` reads
    /// back the old value.
    pub fn error_probability(
        &self,
        stored: bool,
        t_w: f64,
        coeffs: &EnvCoeffs,
        env: &Environment,
    ) -> f64 {
        let fail = 1.0 - self.toggle_probability(t_w, coeffs, env);
        let lands_on_old = if stored {
            self.metastable_bias
        } else {
            1.0 - self.metastable_bias
        };
        fail * ((1.0 - self.metastable_frac) + self.metastable_frac * lands_on_old)
    }
}

/// Threshold shift per mT above the field threshold (ns/mT).
pub const FIELD_TAU_SLOPE: f64 = 0.02;

/// Simulated MRAM chip with 16-bit words.
#[derive(Clone, Debug, PartialEq)]
pub struct ChipModel {
    pub chip_id: String,
    pub num_addresses: usize,
    pub cells: Vec<CellParams>,
    /// Stored word per address; bit `b` is cell `address * 16 + b`.
    pub stored: Vec<u16>,
    pub env_coeffs: EnvCoeffs,
    pub seed: u64,
}

/// Outcome of one bit write. Pure in its arguments.
#[inline(always)]
fn write_bit(
    cell: &CellParams,
    seed: u64,
    cell_index: usize,
    stream: u64,
    stored: bool,
    target: bool,
    p_toggle: f64,
) -> bool {
    if stored == target || p_toggle >= 1.0 {
        return target;
    }
    let k = rng::key(seed, rng::domain::WRITE, cell_index as u64, stream);
    if p_toggle > 0.0 && rng::unit(rng::draw(k, 0)) < p_toggle {
        return target;
    }
    if rng::unit(rng::draw(k, 1)) < cell.metastable_frac {
        rng::unit(rng::draw(k, 2)) < cell.metastable_bias
    } else {
        stored
    }
}

/// Samples a chip from `config`. Deterministic in `(config, seed)`.
pub fn create_chip(config: &ChipConfig, seed: u64) -> Result<ChipModel> {
    config.validate()?;
    let t = config.threshold;
    let s = config.steepness;
    let m = config.metastable;
    let dist_err = |e: &dyn std::fmt::Display| Error::InvalidConfig(e.to_string());

    let word_tau = Normal::new(0.0, t.word_sigma_ns).map_err(|e| dist_err(&e))?;
    let cell_tau = Normal::new(0.0, t.cell_sigma_ns).map_err(|e| dist_err(&e))?;
    let strong =
        LogNormal::new(s.strong_median.ln(), s.word_log_sigma).map_err(|e| dist_err(&e))?;
    let weak = LogNormal::new(s.weak_median.ln(), s.word_log_sigma).map_err(|e| dist_err(&e))?;
    let cell_slope = LogNormal::new(0.0, s.cell_log_sigma).map_err(|e| dist_err(&e))?;
    let beta = |b: crate::device::BetaParams| Beta::new(b.alpha, b.beta).map_err(|e| dist_err(&e));
    let sticky_frac = beta(m.sticky_frac)?;
    let sticky_bias = beta(m.sticky_bias)?;
    let rec_frac = beta(m.recovering_frac)?;
    let rec_bias = beta(m.recovering_bias)?;

    let cells: Vec<CellParams> = (0..config.num_addresses)
        .into_par_iter()
        .flat_map_iter(|address| {
            let mut wr = CounterRng::new(seed, rng::domain::WORD_PARAMS, address as u64, 0);
            let tau_offset = word_tau.sample(&mut wr);
            let is_weak = rng::unit(rand::RngCore::next_u64(&mut wr)) < s.weak_word_fraction;
            let word_slope = if is_weak {
                weak.sample(&mut wr)
            } else {
                strong.sample(&mut wr)
            };
            let recovering_word =
                rng::unit(rand::RngCore::next_u64(&mut wr)) < m.recovering_word_fraction;
            (0..WORD_BITS).map(move |bit| {
                let index = address * WORD_BITS + bit;
                let mut cr = CounterRng::new(seed, rng::domain::CELL_PARAMS, index as u64, 0);
                let tau_ns = (t.mean_ns + tau_offset + cell_tau.sample(&mut cr)).max(t.min_ns);
                let steepness = (word_slope * cell_slope.sample(&mut cr))
                    .clamp(STEEPNESS_RANGE.0, STEEPNESS_RANGE.1);
                let recovering = recovering_word
                    || rng::unit(rand::RngCore::next_u64(&mut cr)) < m.recovering_cell_fraction;
                let (metastable_frac, metastable_bias) = if recovering {
                    (rec_frac.sample(&mut cr), rec_bias.sample(&mut cr))
                } else {
                    (sticky_frac.sample(&mut cr), sticky_bias.sample(&mut cr))
                };
                CellParams {
                    tau_ns,
                    steepness,
                    metastable_frac,
                    metastable_bias,
                }
            })
        })
        .collect();

    Ok(ChipModel {
        chip_id: config.chip_id.clone(),
        num_addresses: config.num_addresses,
        cells,
        stored: vec![0xFFFF; config.num_addresses],
        env_coeffs: config.env_coeffs,
        seed,
    })
}

impl ChipModel {
    /// Total number of cells M.
    pub fn num_cells(&self) -> usize {
        self.num_addresses * WORD_BITS
    }

    fn check_range(&self, range: &Range<usize>) -> Result<()> {
        if range.start > range.end || range.end > self.num_addresses {
            return Err(Error::AddressOutOfRange {
                start: range.start,
                end: range.end,
                num_addresses: self.num_addresses,
            });
        }
        Ok(())
    }

    /// Per-cell toggle success probability for a campaign.
    pub fn toggle_probabilities(&self, t_w: f64, env: &Environment) -> Vec<f64> {
        self.cells
            .par_iter()
            .map(|c| c.toggle_probability(t_w, &self.env_coeffs, env))
            .collect()
    }

    /// Writes all cells of `0xFFFF` at nominal timing.
    pub fn reset(&mut self) {
        self.stored.iter_mut().for_each(|w| *w = 0xFFFF);
    }

    /// Writes `pattern` to every address. Randomness is keyed by
    /// `(chip seed, cell index, stream)`.
    pub fn write(
        &mut self,
        pattern: &DataPattern,
        timing: &TimingParams,
        env: &Environment,
        stream: u64,
    ) -> Result<()> {
        self.write_range(0..self.num_addresses, pattern, timing, env, stream)
    }

    pub fn write_range(
        &mut self,
        range: Range<usize>,
        pattern: &DataPattern,
        timing: &TimingParams,
        env: &Environment,
        stream: u64,
    ) -> Result<()> {
        self.check_range(&range)?;
        timing.validate()?;
        env.validate()?;
        let addrs: Vec<usize> = range.collect();
        self.write_addresses(&addrs, pattern, timing, env, stream)
    }

    /// Writes `pattern` to the listed addresses only.
    pub fn write_addresses(
        &mut self,
        addresses: &[usize],
        pattern: &DataPattern,
        timing: &TimingParams,
        env: &Environment,
        stream: u64,
    ) -> Result<()> {
        timing.validate()?;
        env.validate()?;
        if let Some(&bad) = addresses.iter().find(|&&a| a >= self.num_addresses) {
            return Err(Error::AddressOutOfRange {
                start: bad,
                end: bad + 1,
                num_addresses: self.num_addresses,
            });
        }
        let t_w = timing.t_w;
        let coeffs = self.env_coeffs;
        let seed = self.seed;
        let cells = &self.cells;
        let new_words: Vec<u16> = addresses
            .par_iter()
            .map(|&a| {
                let old = self.stored[a];
                let target = pattern.word_at(a);
                let mut out = 0u16;
                for b in 0..WORD_BITS {
                    let index = a * WORD_BITS + b;
                    let cell = &cells[index];
                    let s = (old >> b) & 1 == 1;
                    let t = (target >> b) & 1 == 1;
                    let p = if s == t {
                        1.0
                    } else {
                        cell.toggle_probability(t_w, &coeffs, env)
                    };
                    if write_bit(cell, seed, index, stream, s, t, p) {
                        out |= 1 << b;
                    }
                }
                out
            })
            .collect();
        for (&a, w) in addresses.iter().zip(new_words) {
            self.stored[a] = w;
        }
        Ok(())
    }

    /// Nominal-timing read; never disturbs the array.
    pub fn read(&self, range: Range<usize>) -> Result<Vec<u16>> {
        self.check_range(&range)?;
        Ok(self.stored[range].to_vec())
    }

    /// N rounds of reset → reduced write → read over the whole array.
    ///
    /// Round `i` uses random stream `i`, so rows are computed independently
    /// and the chip is left holding the last round's contents.
    pub fn measure(
        &mut self,
        pattern: &DataPattern,
        timing: &TimingParams,
        env: &Environment,
        n: usize,
    ) -> Result<MeasurementMatrix> {
        if n < 2 {
            return Err(Error::TooFewMeasurements {
                required: 2,
                got: n,
            });
        }
        timing.validate()?;
        env.validate()?;
        let m = self.num_cells();
        let stride = words_for(m);
        let targets = pattern.expand(0, self.num_addresses);
        let p_toggle = self.toggle_probabilities(timing.t_w, env);
        let seed = self.seed;
        let cells = &self.cells;

        let mut bits = vec![0u64; n * stride];
        bits.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(row, out)| {
                let stream = row as u64;
                for (a, &target) in targets.iter().enumerate() {
                    let mut word = 0u16;
                    for b in 0..WORD_BITS {
                        let index = a * WORD_BITS + b;
                        let t = (target >> b) & 1 == 1;
                        if write_bit(&cells[index], seed, index, stream, true, t, p_toggle[index]) {
                            word |= 1 << b;
                        }
                    }
                    out[a / 4] |= (word as u64) << ((a % 4) * WORD_BITS);
                }
            });

        let last = (0..self.num_addresses)
            .map(|a| {
                let col = a * WORD_BITS;
                (bits[(n - 1) * stride + col / 64] >> (col % 64)) as u16
            })
            .collect();
        self.stored = last;

        Ok(MeasurementMatrix::from_packed(
            n,
            m,
            bits,
            pack_words(&targets),
            Some(*pattern),
            timing.t_w,
            *env,
        ))
    }
}
