// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::characterization::flips::FlipCountVector;
use crate::characterization::matrix::WORD_BITS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Inclusive flip-count window a cell must fall in to be selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionThresholds {
    pub th_l: u32,
    pub th_u: u32,
}

impl SelectionThresholds {
    /// Lower bound only; the upper bound defaults to N − 1.
    pub fn lower(th_l: u32, n_measurements: usize) -> Result<Self> {
        let th_u = n_measurements.saturating_sub(1) as u32;
        Self::new(th_l, th_u, n_measurements)
    }

    pub fn new(th_l: u32, th_u: u32, n_measurements: usize) -> Result<Self> {
        let t = Self { th_l, th_u };
        t.validate(n_measurements)?;
        Ok(t)
    }

    pub fn validate(&self, n_measurements: usize) -> Result<()> {
        let max = n_measurements.saturating_sub(1) as u32;
        if self.th_l == 0 || self.th_l > self.th_u || self.th_u > max {
            return Err(Error::InvalidThresholds(format!(
                "need 0 < th_l ({}) <= th_u ({}) <= N-1 ({max})",
                self.th_l, self.th_u
            )));
        }
        Ok(())
    }
}

/// The selected random-cell set with its address statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSelection {
    num_cells: usize,
    /// Per-address 16-bit membership mask.
    masks: Vec<u16>,
    pub num_randcell: usize,
    /// Percentage of addresses holding at least one selected cell.
    pub rand_addr_fraction: f64,
    /// Selected cells per address that holds any; `None` if none does.
    pub bits_per_rand_addr: Option<f64>,
}

impl CellSelection {
    /// Builds a selection from per-address masks over `num_cells` cells.
    pub fn from_masks(num_cells: usize, masks: Vec<u16>) -> Result<Self> {
        let num_addresses = num_cells.div_ceil(WORD_BITS);
        if masks.len() != num_addresses {
            return Err(Error::InvalidParameter(format!(
                "{} masks for {num_addresses} addresses",
                masks.len()
            )));
        }
        if let Some(last) = masks.last() {
            let used = num_cells - (num_addresses - 1) * WORD_BITS;
            if used < WORD_BITS && (last >> used) != 0 {
                return Err(Error::InvalidParameter(
                    "mask selects cells past the end".into(),
                ));
            }
        }
        let num_randcell: usize = masks.iter().map(|m| m.count_ones() as usize).sum();
        let rand_addrs = masks.iter().filter(|&&m| m != 0).count();
        Ok(Self {
            num_cells,
            num_randcell,
            rand_addr_fraction: if num_addresses == 0 {
                0.0
            } else {
                100.0 * rand_addrs as f64 / num_addresses as f64
            },
            bits_per_rand_addr: (rand_addrs > 0).then(|| num_randcell as f64 / rand_addrs as f64),
            masks,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_addresses(&self) -> usize {
        self.masks.len()
    }

    pub fn num_rand_addresses(&self) -> usize {
        self.masks.iter().filter(|&&m| m != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.num_randcell == 0
    }

    pub fn contains(&self, cell: usize) -> bool {
        cell < self.num_cells && (self.masks[cell / WORD_BITS] >> (cell % WORD_BITS)) & 1 == 1
    }

    pub fn mask(&self, address: usize) -> u16 {
        self.masks[address]
    }

    /// `(address, mask)` for every address with a selected cell, ascending.
    pub fn rand_addresses(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.masks
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(a, &m)| (a, m))
    }

    /// Selected cell indices in ascending (address, bit) order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.rand_addresses().flat_map(|(a, m)| {
            (0..WORD_BITS)
                .filter(move |b| (m >> b) & 1 == 1)
                .map(move |b| a * WORD_BITS + b)
        })
    }

    /// Membership as one flag per cell.
    pub fn mask_bits(&self) -> Vec<bool> {
        (0..self.num_cells).map(|c| self.contains(c)).collect()
    }
}

/// Keeps the cells whose flip count lies in `[th_l, th_u]`.
pub fn select_cells(fc: &FlipCountVector, th: SelectionThresholds) -> Result<CellSelection> {
    th.validate(fc.n_measurements)?;
    let num_addresses = fc.len().div_ceil(WORD_BITS);
    let mut masks = vec![0u16; num_addresses];
    for (c, &count) in fc.counts.iter().enumerate() {
        if (th.th_l..=th.th_u).contains(&count) {
            masks[c / WORD_BITS] |= 1 << (c % WORD_BITS);
        }
    }
    CellSelection::from_masks(fc.len(), masks)
}

/// Expected flip count of an unbiased cell, `p × (N − 1)`.
pub fn expected_threshold<T: Scalar>(n: usize, p: T) -> Result<T> {
    if n < 2 {
        return Err(Error::TooFewMeasurements {
            required: 2,
            got: n,
        });
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    Ok(p * T::from_count(n - 1))
}

/// Starting point for an operator choosing `th_l`: 60 % of the unbiased
/// expectation, rounded.
pub fn suggest_th_l(n: usize) -> u32 {
    (0.6 * (n.saturating_sub(1)) as f64 / 2.0).round().max(1.0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(counts: &[u32], n: usize) -> FlipCountVector {
        FlipCountVector {
            counts: counts.to_vec(),
            n_measurements: n,
        }
    }

    #[test]
    fn direct_rule_application() {
        let th = SelectionThresholds::new(16, 49, 50).unwrap();
        let sel = select_cells(&fc(&[0, 24, 49, 10], 50), th).unwrap();
        assert_eq!(sel.mask_bits(), vec![false, true, true, false]);
        assert_eq!(sel.num_randcell, 2);
        assert_eq!(sel.num_rand_addresses(), 1);
        assert_eq!(sel.bits_per_rand_addr, Some(2.0));
        assert!((sel.rand_addr_fraction - 100.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_bounds() {
        assert!(SelectionThresholds::lower(50, 50).is_err());
        assert!(SelectionThresholds::lower(0, 50).is_err());
        assert!(SelectionThresholds::new(20, 10, 50).is_err());
        assert_eq!(SelectionThresholds::lower(16, 50).unwrap().th_u, 49);
        let bad = SelectionThresholds { th_l: 50, th_u: 50 };
        assert!(select_cells(&fc(&[1, 2], 50), bad).is_err());
    }

    #[test]
    fn empty_selection_has_no_ratio() {
        let th = SelectionThresholds::lower(3, 4).unwrap();
        let sel = select_cells(&fc(&[0; 32], 4), th).unwrap();
        assert!(sel.is_empty());
        assert_eq!(sel.bits_per_rand_addr, None);
        assert_eq!(sel.rand_addr_fraction, 0.0);
    }

    #[test]
    fn ratio_ignores_empty_addresses() {
        let mut counts = vec![0u32; 48];
        counts[0] = 5;
        counts[3] = 5;
        counts[40] = 5;
        let sel = select_cells(&fc(&counts, 6), SelectionThresholds::lower(4, 6).unwrap()).unwrap();
        assert_eq!(sel.num_randcell, 3);
        assert_eq!(sel.bits_per_rand_addr, Some(1.5));
        assert!((sel.rand_addr_fraction - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(sel.cells().collect::<Vec<_>>(), vec![0, 3, 40]);
    }

    #[test]
    fn expected_threshold_values() {
        assert_eq!(expected_threshold(50, 0.5f64).unwrap(), 24.5);
        assert_eq!(expected_threshold(2, 0.5f64).unwrap(), 0.5);
        assert!((expected_threshold(11, 0.3f64).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(expected_threshold(50, 0.5f32).unwrap(), 24.5f32);
        assert!(expected_threshold(1, 0.5f64).is_err());
        assert!(expected_threshold(10, 1.5f64).is_err());
    }

    #[test]
    fn suggested_threshold() {
        assert_eq!(suggest_th_l(50), 15);
    }
}
