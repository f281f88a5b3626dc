// SPDX-License-Identifier: Apache-2.0

//! Toggle-MRAM write-latency TRNG: a behavioural chip simulator, flip-count
//! cell characterization, SHA-256 conditioning, a core randomness battery and
//! a throughput model.
//!
//! Numeric kernels (special functions, test statistics, throughput) are
//! generic over [`Scalar`]; the aliases below fix the precision.

pub mod characterization;
pub mod device;
pub mod error;
pub mod extraction;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod throughput;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TestResultF64 = stats::TestResult<f64>;
pub type TestResultF32 = stats::TestResult<f32>;
pub type ThroughputInputsF64 = throughput::ThroughputInputs<f64>;
pub type ThroughputInputsF32 = throughput::ThroughputInputs<f32>;
pub type ThroughputEstimateF64 = throughput::ThroughputEstimate<f64>;
pub type ThroughputEstimateF32 = throughput::ThroughputEstimate<f32>;
