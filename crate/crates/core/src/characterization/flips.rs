// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use crate::characterization::matrix::MeasurementMatrix;

/// Per-cell number of readout changes between consecutive measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipCountVector {
    pub counts: Vec<u32>,
    pub n_measurements: usize,
}

impl FlipCountVector {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Largest possible count, N − 1.
    pub fn max_count(&self) -> u32 {
        (self.n_measurements - 1) as u32
    }

    /// Histogram over 0..=N−1.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.n_measurements];
        for &c in &self.counts {
            h[c as usize] += 1;
        }
        h
    }
}

/// XORs each pair of consecutive measurements and accumulates the result per
/// cell.
pub fn count_flips(m: &MeasurementMatrix) -> FlipCountVector {
    let cols = m.cols();
    let rows = m.rows();
    let mut counts = vec![0u32; cols];
    counts
        .par_chunks_mut(64)
        .enumerate()
        .for_each(|(w, chunk)| {
            for r in 0..rows - 1 {
                let mut x = m.row_words(r)[w] ^ m.row_words(r + 1)[w];
                while x != 0 {
                    let b = x.trailing_zeros() as usize;
                    // padding bits are zero in every row, so b < chunk.len()
                    chunk[b] += 1;
                    x &= x - 1;
                }
            }
        });
    FlipCountVector {
        counts,
        n_measurements: rows,
    }
}
