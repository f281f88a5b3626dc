// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Manufacturer write cycle time (ns).
pub const NOMINAL_T_WC: f64 = 35.0;
/// Manufacturer write pulse width (ns).
pub const NOMINAL_T_W: f64 = 15.0;
/// Write recovery time (ns).
pub const NOMINAL_T_WR: f64 = 12.0;
/// Data valid to end of write (ns).
pub const NOMINAL_T_DV: f64 = 10.0;

/// Write-enable controlled write cycle timing, all durations in ns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingParams {
    pub t_wc: f64,
    pub t_w: f64,
    pub t_wr: f64,
    pub t_dv: f64,
}

impl TimingParams {
    pub fn new(t_wc: f64, t_w: f64, t_wr: f64, t_dv: f64) -> Result<Self> {
        let t = Self {
            t_wc,
            t_w,
            t_wr,
            t_dv,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn nominal() -> Self {
        Self {
            t_wc: NOMINAL_T_WC,
            t_w: NOMINAL_T_W,
            t_wr: NOMINAL_T_WR,
            t_dv: NOMINAL_T_DV,
        }
    }

    /// Nominal timing with the write pulse shortened to `t_w`. The data-valid
    /// window shrinks with it so it never exceeds the pulse.
    pub fn with_write_pulse(t_w: f64) -> Result<Self> {
        let n = Self::nominal();
        Self::new(n.t_wc, t_w, n.t_wr, n.t_dv.min(t_w))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.t_wc, self.t_w, self.t_wr, self.t_dv];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidTiming(format!(
                "all durations must be positive and finite: {self:?}"
            )));
        }
        if self.t_w > self.t_wc {
            return Err(Error::InvalidTiming(format!(
                "t_w ({}) exceeds t_wc ({})",
                self.t_w, self.t_wc
            )));
        }
        if self.t_dv > self.t_w {
            return Err(Error::InvalidTiming(format!(
                "t_dv ({}) exceeds t_w ({})",
                self.t_dv, self.t_w
            )));
        }
        Ok(())
    }
}

impl Default for TimingParams {
    fn default() -> Self {
        Self::nominal()
    }
}
