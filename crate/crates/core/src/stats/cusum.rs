// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;
use crate::stats::sequence::{BitSequence, TestResult};
use crate::stats::special::normal_cdf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CusumMode {
    Forward,
    Reverse,
}

impl fmt::Display for CusumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CusumMode::Forward => "forward",
            CusumMode::Reverse => "reverse",
        })
    }
}

impl FromStr for CusumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "forward" => Ok(Self::Forward),
            "reverse" => Ok(Self::Reverse),
            _ => Err(Error::InvalidParameter(format!("unknown cusum mode {s:?}"))),
        }
    }
}

/// Maximal excursion of the ±1 random walk.
pub fn cumulative_sums<T: Scalar>(seq: &BitSequence, mode: CusumMode) -> TestResult<T> {
    let n = seq.len();
    let step = |b: &bool| if *b { 1i64 } else { -1 };
    let walk = |acc: (i64, i64), s: i64| {
        let sum = acc.0 + s;
        (sum, acc.1.max(sum.abs()))
    };
    let (_, z) = match mode {
        CusumMode::Forward => seq.bits().iter().map(step).fold((0, 0), walk),
        CusumMode::Reverse => seq.bits().iter().rev().map(step).fold((0, 0), walk),
    };
    let (ni, zi) = (n as i64, z);
    let nf = T::from_count(n).sqrt();
    let zf = T::c(z as f64);
    let phi = |k: i64| normal_cdf(T::c(k as f64) * zf / nf);
    // integer bounds truncate toward zero, as in the reference implementation
    let sum1 = ((-ni / zi + 1) / 4..=(ni / zi - 1) / 4)
        .fold(T::zero(), |acc, k| acc + phi(4 * k + 1) - phi(4 * k - 1));
    let sum2 = ((-ni / zi - 3) / 4..=(ni / zi - 1) / 4)
        .fold(T::zero(), |acc, k| acc + phi(4 * k + 3) - phi(4 * k + 1));
    TestResult::new("CumulativeSums", T::one() - sum1 + sum2, zf)
}
