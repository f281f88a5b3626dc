// SPDX-License-Identifier: Apache-2.0

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// A non-empty bit sequence under test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<bool>,
}

impl BitSequence {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InputTooShort {
                required: 1,
                got: 0,
            });
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Splits `bits` into consecutive sequences of `len` bits; a short tail is
    /// dropped.
    pub fn split(bits: &[bool], len: usize) -> Result<Vec<Self>> {
        if len == 0 {
            return Err(Error::InvalidParameter(
                "sequence length must be positive".into(),
            ));
        }
        Ok(bits
            .chunks_exact(len)
            .map(|c| Self { bits: c.to_vec() })
            .collect())
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(crate::extraction::from_ascii(s.as_bytes())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult<T = f64> {
    pub test_name: String,
    pub p_value: T,
    pub passed: bool,
    /// Test-specific statistic (χ², |S|/√n, z, ...).
    pub statistic: T,
}

impl<T: Scalar> TestResult<T> {
    pub(crate) fn new(name: &str, p_value: T, statistic: T) -> Self {
        let p_value = p_value.max(T::zero()).min(T::one());
        Self {
            test_name: name.to_owned(),
            passed: p_value >= T::c(DEFAULT_ALPHA),
            p_value,
            statistic,
        }
    }

    /// Re-evaluates `passed` at another significance level.
    pub fn at_alpha(mut self, alpha: T) -> Self {
        self.passed = self.p_value >= alpha;
        self
    }
}
