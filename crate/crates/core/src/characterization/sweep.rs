// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::device::{ChipModel, DataPattern, Environment, TimingParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t_w: f64,
    /// Mean fraction of cells that read back wrong.
    pub error_fraction: f64,
}

/// Measures the error rate at each write pulse width.
pub fn sweep_tw(
    chip: &mut ChipModel,
    pattern: &DataPattern,
    tw_list: &[f64],
    env: &Environment,
    n: usize,
) -> Result<Vec<SweepPoint>> {
    if tw_list.is_empty() {
        return Err(Error::EmptySweep);
    }
    tw_list
        .iter()
        .map(|&t_w| {
            let timing = TimingParams::with_write_pulse(t_w)?;
            let m = chip.measure(pattern, &timing, env, n)?;
            log::debug!("t_w {t_w} ns: error fraction {}", m.mean_error_fraction());
            Ok(SweepPoint {
                t_w,
                error_fraction: m.mean_error_fraction(),
            })
        })
        .collect()
}

/// Pulse width with the highest error rate; ties go to the longer pulse.
pub fn choose_tw(sweep: &[SweepPoint]) -> Result<f64> {
    sweep
        .iter()
        .copied()
        .reduce(|best, p| {
            let better = p.error_fraction > best.error_fraction
                || (p.error_fraction == best.error_fraction && p.t_w > best.t_w);
            if better {
                p
            } else {
                best
            }
        })
        .map(|p| p.t_w)
        .ok_or(Error::EmptySweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(t_w: f64, e: f64) -> SweepPoint {
        SweepPoint {
            t_w,
            error_fraction: e,
        }
    }

    #[test]
    fn picks_maximum() {
        let s = [pt(15.0, 0.0), pt(5.0, 0.01), pt(2.5, 0.3)];
        assert_eq!(choose_tw(&s).unwrap(), 2.5);
    }

    #[test]
    fn tie_prefers_longer_pulse() {
        let s = [pt(2.0, 0.3), pt(2.5, 0.3), pt(5.0, 0.1)];
        assert_eq!(choose_tw(&s).unwrap(), 2.5);
        assert_eq!(choose_tw(&[pt(5.0, 0.2), pt(2.5, 0.2)]).unwrap(), 5.0);
    }

    #[test]
    fn empty_sweep() {
        assert!(matches!(choose_tw(&[]), Err(Error::EmptySweep)));
    }
}
