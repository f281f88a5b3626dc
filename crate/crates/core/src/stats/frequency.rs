// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::sequence::{BitSequence, TestResult};
use crate::stats::special::{erfc, igamc};

/// Monobit frequency test.
pub fn frequency_monobit<T: Scalar>(seq: &BitSequence) -> TestResult<T> {
    let n = seq.len();
    if n < 100 {
        log::warn!("frequency test on {n} bits; at least 100 recommended");
    }
    let s = 2 * seq.ones() as i64 - n as i64;
    let s_obs = T::c(s.unsigned_abs() as f64) / T::from_count(n).sqrt();
    TestResult::new(
        "Frequency",
        erfc(s_obs / T::c(std::f64::consts::SQRT_2)),
        s_obs,
    )
}

/// Frequency within `m_block`-bit blocks; the partial tail block is ignored.
pub fn block_frequency<T: Scalar>(seq: &BitSequence, m_block: usize) -> Result<TestResult<T>> {
    if m_block < 2 {
        return Err(Error::InvalidParameter(format!(
            "block length {m_block} < 2"
        )));
    }
    if seq.len() < m_block {
        return Err(Error::InputTooShort {
            required: m_block,
            got: seq.len(),
        });
    }
    let m = T::from_count(m_block);
    let half = T::c(0.5);
    let blocks = seq.bits().chunks_exact(m_block);
    let n_blocks = blocks.len();
    let sum = blocks.fold(T::zero(), |acc, b| {
        let pi = T::from_count(b.iter().filter(|&&x| x).count()) / m;
        acc + (pi - half) * (pi - half)
    });
    let chi2 = T::c(4.0) * m * sum;
    Ok(TestResult::new(
        "BlockFrequency",
        igamc(T::from_count(n_blocks) / T::c(2.0), chi2 / T::c(2.0)),
        chi2,
    ))
}
