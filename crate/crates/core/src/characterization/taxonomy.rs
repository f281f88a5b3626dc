// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::characterization::matrix::MeasurementMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    /// Reads back the written bit in every measurement.
    PersistentCorrect,
    /// Reads back the opposite bit in every measurement.
    PersistentError,
    /// Readout changes at least once.
    NoiseProne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTaxonomy {
    pub classes: Vec<CellClass>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyCounts {
    pub persistent_correct: usize,
    pub persistent_error: usize,
    pub noise_prone: usize,
}

impl TaxonomyCounts {
    pub fn total(&self) -> usize {
        self.persistent_correct + self.persistent_error + self.noise_prone
    }

    /// Share of cells that never changed across the campaign.
    pub fn invariant_fraction(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            return 0.0;
        }
        (self.persistent_correct + self.persistent_error) as f64 / t as f64
    }
}

impl CellTaxonomy {
    pub fn counts(&self) -> TaxonomyCounts {
        let mut c = TaxonomyCounts::default();
        for k in &self.classes {
            match k {
                CellClass::PersistentCorrect => c.persistent_correct += 1,
                CellClass::PersistentError => c.persistent_error += 1,
                CellClass::NoiseProne => c.noise_prone += 1,
            }
        }
        c
    }
}

pub fn classify_cells(m: &MeasurementMatrix) -> CellTaxonomy {
    let stride = m.written_words().len();
    let mut all_one = vec![u64::MAX; stride];
    let mut any_one = vec![0u64; stride];
    for r in 0..m.rows() {
        for (i, &w) in m.row_words(r).iter().enumerate() {
            all_one[i] &= w;
            any_one[i] |= w;
        }
    }
    let classes = (0..m.cols())
        .map(|c| {
            let (i, b) = (c / 64, c % 64);
            let always = (all_one[i] >> b) & 1 == 1;
            let ever = (any_one[i] >> b) & 1 == 1;
            if always != ever {
                CellClass::NoiseProne
            } else if always == m.written_bit(c) {
                CellClass::PersistentCorrect
            } else {
                CellClass::PersistentError
            }
        })
        .collect();
    CellTaxonomy { classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_classes() {
        let rows = vec![
            vec![false, true, true, false],
            vec![false, true, false, false],
            vec![false, true, true, false],
        ];
        let m = MeasurementMatrix::from_rows(&rows, &[false, false, false, true]).unwrap();
        let t = classify_cells(&m);
        assert_eq!(
            t.classes,
            vec![
                CellClass::PersistentCorrect,
                CellClass::PersistentError,
                CellClass::NoiseProne,
                CellClass::PersistentError,
            ]
        );
        let c = t.counts();
        assert_eq!(
            (c.persistent_correct, c.persistent_error, c.noise_prone),
            (1, 2, 1)
        );
        assert!((c.invariant_fraction() - 0.75).abs() < 1e-12);
    }
}
