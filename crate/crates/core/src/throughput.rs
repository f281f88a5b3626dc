// SPDX-License-Identifier: Apache-2.0

//! Generation-rate model: raw-bit collection time per hash block plus the
//! hash time, against the digest length.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::characterization::{CellSelection, WORD_BITS};
use crate::device::{ChipModel, DataPattern, Environment, TimingParams};
use crate::error::{Error, Result};
use crate::extraction::{pack_msb, sha256, BlockParams};
use crate::scalar::Scalar;

/// Measured board read/write time per address (ns).
pub const REFERENCE_T_RW_NS: f64 = 239.76;
/// Measured time to hash one 512-bit block (ns).
pub const REFERENCE_T_HASH_NS: f64 = 802.6;
/// Published bits per random address for the five reference chips.
pub const REFERENCE_BITS_PER_ADDR: [(&str, f64); 5] = [
    ("C1", 9.71),
    ("C2", 10.71),
    ("C3", 13.19),
    ("C4", 11.39),
    ("C5", 12.76),
];
/// Published throughput of the same chips (Mbit/s).
pub const REFERENCE_MBIT_PER_S: [f64; 5] = [18.17, 19.95, 24.12, 21.10, 23.47];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputInputs<T = f64> {
    pub t_rw_ns: T,
    pub t_hash_ns: T,
    pub b_len: usize,
    pub d_len: usize,
    pub bits_per_rand_addr: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputEstimate<T = f64> {
    pub t_rw_avg_ns: T,
    pub mbit_per_s: T,
}

impl<T: Scalar> ThroughputInputs<T> {
    /// Inputs with the default 512/256 block sizes.
    pub fn new(t_rw_ns: T, t_hash_ns: T, bits_per_rand_addr: T) -> Result<Self> {
        let p = BlockParams::default();
        let i = Self {
            t_rw_ns,
            t_hash_ns,
            b_len: p.b_len,
            d_len: p.d_len,
            bits_per_rand_addr,
        };
        i.validate()?;
        Ok(i)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !(positive(self.t_rw_ns)
            && positive(self.t_hash_ns)
            && positive(self.bits_per_rand_addr))
        {
            return Err(Error::InvalidParameter(format!(
                "timings and bits per address must be positive (t_rw {}, t_hash {}, bits {})",
                self.t_rw_ns, self.t_hash_ns, self.bits_per_rand_addr
            )));
        }
        if self.d_len == 0 || self.b_len < self.d_len {
            return Err(Error::InvalidParameter(format!(
                "need 0 < d_len ({}) <= b_len ({})",
                self.d_len, self.b_len
            )));
        }
        Ok(())
    }
}

/// Time to collect one input block of raw bits.
pub fn t_rw_avg<T: Scalar>(inputs: &ThroughputInputs<T>) -> Result<T> {
    inputs.validate()?;
    Ok(inputs.t_rw_ns * T::from_count(inputs.b_len) / inputs.bits_per_rand_addr)
}

/// Output rate in Mbit/s (10⁶ bit/s).
pub fn throughput<T: Scalar>(inputs: &ThroughputInputs<T>) -> Result<ThroughputEstimate<T>> {
    let t_rw_avg_ns = t_rw_avg(inputs)?;
    // bits per ns is Gbit/s
    let mbit_per_s = T::from_count(inputs.d_len) / (t_rw_avg_ns + inputs.t_hash_ns) * T::c(1e3);
    Ok(ThroughputEstimate {
        t_rw_avg_ns,
        mbit_per_s,
    })
}

/// One line of a throughput report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRow {
    pub chip_id: String,
    pub inputs: ThroughputInputs,
    pub estimate: ThroughputEstimate,
}

impl ThroughputRow {
    pub fn new(chip_id: &str, inputs: ThroughputInputs) -> Result<Self> {
        Ok(Self {
            chip_id: chip_id.to_owned(),
            estimate: throughput(&inputs)?,
            inputs,
        })
    }
}

pub fn throughput_csv(rows: &[ThroughputRow]) -> String {
    let mut s = String::from("chip_id,t_rw_ns,t_hash_ns,bits_per_addr,mbit_per_s\n");
    for r in rows {
        writeln!(
            s,
            "{},{:.3},{:.3},{:.4},{:.4}",
            r.chip_id,
            r.inputs.t_rw_ns,
            r.inputs.t_hash_ns,
            r.inputs.bits_per_rand_addr,
            r.estimate.mbit_per_s
        )
        .unwrap();
    }
    s
}

/// Throughput of the five reference chips from the published inputs.
pub fn reference_rows() -> Vec<ThroughputRow> {
    REFERENCE_BITS_PER_ADDR
        .iter()
        .map(|&(id, bits)| {
            let inputs = ThroughputInputs::new(REFERENCE_T_RW_NS, REFERENCE_T_HASH_NS, bits)
                .expect("reference inputs are valid");
            ThroughputRow::new(id, inputs).expect("reference inputs are valid")
        })
        .collect()
}

/// Minimum repetitions accepted by [`measure_pipeline_times`].
pub const MIN_TIMING_REPS: usize = 100;

/// Blocks hashed per timed repetition, so one sample spans many timer ticks.
const HASH_BATCH: usize = 64;

/// Wall-clock `t_rw` and `t_hash` of this simulator's own harvest and
/// conditioning steps, averaged over `reps` repetitions after `reps / 10`
/// discarded warm-up runs. Runs on a single thread.
pub fn measure_pipeline_times(
    chip: &mut ChipModel,
    sel: &CellSelection,
    pattern: &DataPattern,
    t_w: f64,
    env: &Environment,
    reps: usize,
) -> Result<ThroughputInputs> {
    if reps < MIN_TIMING_REPS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_TIMING_REPS} timing repetitions, got {reps}"
        )));
    }
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    let timing = TimingParams::with_write_pulse(t_w)?;
    let addrs: Vec<usize> = sel.rand_addresses().map(|(a, _)| a).collect();
    let warmup = reps / 10;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::TimerResolution(e.to_string()))?;

    let (rw_ns, hash_ns) = pool.install(|| -> Result<(f64, f64)> {
        let mut rw_total = 0u128;
        for rep in 0..warmup + reps {
            chip.reset();
            let start = Instant::now();
            chip.write_addresses(&addrs, pattern, &timing, env, rep as u64)?;
            for &a in &addrs {
                black_box(chip.read(a..a + 1)?);
            }
            if rep >= warmup {
                rw_total += start.elapsed().as_nanos();
            }
        }
        let block: Vec<bool> = (0..512).map(|i| i % 3 == 0).collect();
        let bytes = pack_msb(&block);
        let mut hash_total = 0u128;
        for rep in 0..warmup + reps {
            let start = Instant::now();
            for _ in 0..HASH_BATCH {
                black_box(sha256(black_box(&bytes)));
            }
            if rep >= warmup {
                hash_total += start.elapsed().as_nanos();
            }
        }
        Ok((
            rw_total as f64 / (reps * addrs.len()) as f64,
            hash_total as f64 / (reps * HASH_BATCH) as f64,
        ))
    })?;

    if !(rw_ns > 0.0 && hash_ns > 0.0) {
        return Err(Error::TimerResolution(format!(
            "measured t_rw {rw_ns} ns, t_hash {hash_ns} ns"
        )));
    }
    let bits = sel
        .bits_per_rand_addr
        .ok_or(Error::EmptySelection)?
        .min(WORD_BITS as f64);
    ThroughputInputs::new(rw_ns, hash_ns, bits)
}
