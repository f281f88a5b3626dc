// SPDX-License-Identifier: Apache-2.0

//! Core randomness tests, the multi-sequence battery and ASCII interchange.

mod battery;
mod cusum;
mod frequency;
mod runs;
mod sequence;
pub mod special;
mod sts;
mod templates;

pub use battery::{
    run_battery, uniformity_p, BatteryConfig, BatteryRow, BatterySummary, BATTERY_ROWS,
};
pub use cusum::{cumulative_sums, CusumMode};
pub use frequency::{block_frequency, frequency_monobit};
pub use runs::{longest_run, runs, LONGEST_RUN_MIN_BITS};
pub use sequence::{BitSequence, TestResult, DEFAULT_ALPHA};
pub use special::{erfc, igam, igamc, ln_gamma, normal_cdf};
pub use sts::{export_sts, import_sts};
pub use templates::{apen_value, approximate_entropy, serial, MAX_TEMPLATE_BITS};
