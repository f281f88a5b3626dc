// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

/// Errors produced anywhere in the simulation and generation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid timing parameters: {0}")]
    InvalidTiming(String),
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("invalid chip configuration: {0}")]
    InvalidConfig(String),
    #[error("address range {start}..{end} outside chip with {num_addresses} addresses")]
    AddressOutOfRange {
        start: usize,
        end: usize,
        num_addresses: usize,
    },
    #[error("at least {required} measurements are needed, got {got}")]
    TooFewMeasurements { required: usize, got: usize },
    #[error("invalid selection thresholds: {0}")]
    InvalidThresholds(String),
    #[error("cell selection is empty")]
    EmptySelection,
    #[error("empty timing sweep")]
    EmptySweep,
    #[error("input too short: need at least {required} bits, got {got}")]
    InputTooShort { required: usize, got: usize },
    #[error("invalid test parameter: {0}")]
    InvalidParameter(String),
    #[error("sequences have mixed lengths ({first} and {other})")]
    MixedLengths { first: usize, other: usize },
    #[error("timer resolution insufficient: {0}")]
    TimerResolution(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
