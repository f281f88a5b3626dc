// SPDX-License-Identifier: Apache-2.0

//! Phenomenological toggle-MRAM chip under reduced write-pulse timing.

mod chip;
mod chip_file;
mod config;
mod environment;
mod pattern;
mod timing;

pub use chip::{create_chip, CellParams, ChipModel, FIELD_TAU_SLOPE};
pub use chip_file::{
    decode_chip, encode_chip, load_chip, save_chip, CHIP_FORMAT_VERSION, CHIP_MAGIC,
};
pub use config::{
    preset, presets, BetaParams, ChipConfig, EnvCoeffs, MetastableDist, Preset, SteepnessDist,
    ThresholdDist,
};
pub use environment::{Environment, FieldAxis, OPERATING_WINDOW_C, T_REF_C};
pub use pattern::{DataPattern, ROW_WORDS};
pub use timing::{TimingParams, NOMINAL_T_DV, NOMINAL_T_W, NOMINAL_T_WC, NOMINAL_T_WR};
