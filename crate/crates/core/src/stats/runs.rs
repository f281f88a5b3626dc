// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::sequence::{BitSequence, TestResult};
use crate::stats::special::{erfc, igamc};

/// Total number of runs of identical bits.
pub fn runs<T: Scalar>(seq: &BitSequence) -> TestResult<T> {
    let n = seq.len();
    let nf = T::from_count(n);
    let pi = T::from_count(seq.ones()) / nf;
    let v = 1 + seq.bits().windows(2).filter(|w| w[0] != w[1]).count();
    let vf = T::from_count(v);
    let tau = T::c(2.0) / nf.sqrt();
    if (pi - T::c(0.5)).abs() >= tau {
        return TestResult::new("Runs", T::zero(), vf);
    }
    let two = T::c(2.0);
    let pq = pi * (T::one() - pi);
    let num = (vf - two * nf * pq).abs();
    let den = two * (two * nf).sqrt() * pq;
    TestResult::new("Runs", erfc(num / den), vf)
}

/// Block length, category bounds and category probabilities by sequence
/// length.
struct LongestRunTable {
    m: usize,
    low: usize,
    pi: &'static [f64],
}

const LR_8: LongestRunTable = LongestRunTable {
    m: 8,
    low: 1,
    pi: &[0.21484375, 0.3671875, 0.23046875, 0.1875],
};
const LR_128: LongestRunTable = LongestRunTable {
    m: 128,
    low: 4,
    pi: &[
        0.117_403_578_8,
        0.242_955_959,
        0.249_363_483,
        0.175_177_06,
        0.102_701_071,
        0.112_398_847,
    ],
};
const LR_10K: LongestRunTable = LongestRunTable {
    m: 10_000,
    low: 10,
    pi: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
};

/// Minimum sequence length for [`longest_run`].
pub const LONGEST_RUN_MIN_BITS: usize = 128;

/// Longest run of ones within blocks.
pub fn longest_run<T: Scalar>(seq: &BitSequence) -> Result<TestResult<T>> {
    let n = seq.len();
    let table = match n {
        _ if n < LONGEST_RUN_MIN_BITS => {
            return Err(Error::InputTooShort {
                required: LONGEST_RUN_MIN_BITS,
                got: n,
            })
        }
        _ if n < 6272 => &LR_8,
        _ if n < 750_000 => &LR_128,
        _ => &LR_10K,
    };
    let k = table.pi.len() - 1;
    let mut nu = vec![0usize; k + 1];
    let blocks = seq.bits().chunks_exact(table.m);
    let n_blocks = blocks.len();
    for block in blocks {
        let (mut best, mut cur) = (0usize, 0usize);
        for &b in block {
            cur = if b { cur + 1 } else { 0 };
            best = best.max(cur);
        }
        nu[best.clamp(table.low, table.low + k) - table.low] += 1;
    }
    let nb = T::from_count(n_blocks);
    let chi2 = nu.iter().zip(table.pi).fold(T::zero(), |acc, (&v, &p)| {
        let e = nb * T::c(p);
        let d = T::from_count(v) - e;
        acc + d * d / e
    });
    Ok(TestResult::new(
        "LongestRun",
        igamc(T::from_count(k) / T::c(2.0), chi2 / T::c(2.0)),
        chi2,
    ))
}
