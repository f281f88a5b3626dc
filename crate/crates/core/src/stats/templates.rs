// SPDX-License-Identifier: Apache-2.0

//! Tests over overlapping, wrapped m-bit templates.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::sequence::{BitSequence, TestResult};
use crate::stats::special::igamc;

/// Largest template width supported by the counting tables.
pub const MAX_TEMPLATE_BITS: usize = 24;

/// Occurrence counts of every `m`-bit pattern over the sequence extended
/// cyclically by its first `m − 1` bits.
fn template_counts(bits: &[bool], m: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << m];
    if m == 0 {
        counts[0] = bits.len() as u64;
        return counts;
    }
    let mask = (1usize << m) - 1;
    let mut w = 0usize;
    let wrapped = bits.iter().chain(bits.iter().take(m - 1));
    for (i, &b) in wrapped.enumerate() {
        w = ((w << 1) | b as usize) & mask;
        if i + 1 >= m {
            counts[w] += 1;
        }
    }
    counts
}

fn check_width(m: usize, min: usize, n: usize) -> Result<()> {
    if m < min || m > MAX_TEMPLATE_BITS || m > n {
        return Err(Error::InvalidParameter(format!(
            "template width {m} outside [{min}, min({MAX_TEMPLATE_BITS}, n = {n})]"
        )));
    }
    Ok(())
}

fn psi_sq<T: Scalar>(bits: &[bool], m: usize) -> T {
    if m == 0 {
        return T::zero();
    }
    let n = T::from_count(bits.len());
    let sum = template_counts(bits, m)
        .iter()
        .fold(T::zero(), |acc, &c| acc + T::c(c as f64) * T::c(c as f64));
    T::c((1u64 << m) as f64) / n * sum - n
}

/// Serial test; returns the `∇ψ²` and `∇²ψ²` results in that order.
pub fn serial<T: Scalar>(seq: &BitSequence, m: usize) -> Result<[TestResult<T>; 2]> {
    let n = seq.len();
    check_width(m, 2, n)?;
    if (m as f64) >= (n as f64).log2().floor() - 2.0 {
        log::warn!("serial test width {m} is large for {n} bits");
    }
    let bits = seq.bits();
    let (p0, p1, p2) = (
        psi_sq::<T>(bits, m),
        psi_sq::<T>(bits, m - 1),
        psi_sq::<T>(bits, m - 2),
    );
    let d1 = p0 - p1;
    let d2 = p0 - T::c(2.0) * p1 + p2;
    let two = T::c(2.0);
    Ok([
        TestResult::new("Serial", igamc(two.powi(m as i32 - 2), d1 / two), d1),
        TestResult::new("Serial", igamc(two.powi(m as i32 - 3), d2 / two), d2),
    ])
}

fn phi<T: Scalar>(bits: &[bool], m: usize) -> T {
    if m == 0 {
        return T::zero();
    }
    let n = T::from_count(bits.len());
    template_counts(bits, m)
        .iter()
        .filter(|&&c| c > 0)
        .fold(T::zero(), |acc, &c| {
            let p = T::c(c as f64) / n;
            acc + p * p.ln()
        })
}

/// Approximate entropy comparing `m`- and `(m+1)`-bit template frequencies.
/// The statistic is χ².
pub fn approximate_entropy<T: Scalar>(seq: &BitSequence, m: usize) -> Result<TestResult<T>> {
    let n = seq.len();
    check_width(m + 1, 2, n)?;
    let bits = seq.bits();
    let apen = phi::<T>(bits, m) - phi::<T>(bits, m + 1);
    let chi2 = T::c(2.0) * T::from_count(n) * (T::c(std::f64::consts::LN_2) - apen);
    Ok(TestResult::new(
        "ApproximateEntropy",
        igamc(T::c(2.0).powi(m as i32 - 1), chi2 / T::c(2.0)),
        chi2,
    ))
}

/// `ApEn(m)` itself, exposed for diagnostics.
pub fn apen_value<T: Scalar>(seq: &BitSequence, m: usize) -> Result<T> {
    check_width(m + 1, 2, seq.len())?;
    Ok(phi::<T>(seq.bits(), m) - phi::<T>(seq.bits(), m + 1))
}
