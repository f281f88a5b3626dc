// SPDX-License-Identifier: Apache-2.0

use crate::device::{DataPattern, Environment};
use crate::error::{Error, Result};

/// Cells per address.
pub const WORD_BITS: usize = 16;

/// Bit-packed row: cell `c` lives in word `c / 64`, bit `c % 64`.
pub(crate) fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

/// Packs 16-bit memory words into a row, address-major with bit `b` of the
/// word at cell `address * 16 + b`.
pub(crate) fn pack_words(words: &[u16]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(words.len() * WORD_BITS)];
    for (a, w) in words.iter().enumerate() {
        out[a / 4] |= (*w as u64) << ((a % 4) * WORD_BITS);
    }
    out
}

/// N × M readout matrix from repeated write/read campaigns.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
    written: Vec<u64>,
    pub pattern: Option<DataPattern>,
    pub t_w: f64,
    pub env: Environment,
}

impl MeasurementMatrix {
    pub(crate) fn from_packed(
        rows: usize,
        cols: usize,
        bits: Vec<u64>,
        written: Vec<u64>,
        pattern: Option<DataPattern>,
        t_w: f64,
        env: Environment,
    ) -> Self {
        let stride = words_for(cols);
        debug_assert_eq!(bits.len(), rows * stride);
        debug_assert_eq!(written.len(), stride);
        Self {
            rows,
            cols,
            stride,
            bits,
            written,
            pattern,
            t_w,
            env,
        }
    }

    /// Builds a matrix from explicit rows of readouts and the expected bit per
    /// cell. Mostly useful for tests and offline data.
    pub fn from_rows(rows: &[Vec<bool>], written: &[bool]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::TooFewMeasurements {
                required: 2,
                got: rows.len(),
            });
        }
        let cols = written.len();
        let stride = words_for(cols);
        let mut bits = vec![0u64; rows.len() * stride];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidParameter(format!(
                    "row {r} has {} cells, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                if b {
                    bits[r * stride + c / 64] |= 1 << (c % 64);
                }
            }
        }
        let mut w = vec![0u64; stride];
        for (c, &b) in written.iter().enumerate() {
            if b {
                w[c / 64] |= 1 << (c % 64);
            }
        }
        Ok(Self::from_packed(
            rows.len(),
            cols,
            bits,
            w,
            None,
            f64::NAN,
            Environment::room(),
        ))
    }

    /// Number of measurements N.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of cells M.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols);
        (self.bits[row * self.stride + col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn written_bit(&self, col: usize) -> bool {
        assert!(col < self.cols);
        (self.written[col / 64] >> (col % 64)) & 1 == 1
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.stride..(row + 1) * self.stride]
    }

    pub fn written_words(&self) -> &[u64] {
        &self.written
    }

    /// Mask clearing the padding bits of the last packed word.
    pub(crate) fn tail_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    /// Number of cells in `row` whose readout differs from the written bit.
    pub fn row_errors(&self, row: usize) -> usize {
        let last = self.stride - 1;
        self.row_words(row)
            .iter()
            .zip(&self.written)
            .enumerate()
            .map(|(i, (r, w))| {
                let x = r ^ w;
                let x = if i == last { x & self.tail_mask() } else { x };
                x.count_ones() as usize
            })
            .sum()
    }

    pub fn row_error_fraction(&self, row: usize) -> f64 {
        self.row_errors(row) as f64 / self.cols as f64
    }

    /// Mean over rows of the per-row error fraction.
    pub fn mean_error_fraction(&self) -> f64 {
        let total: usize = (0..self.rows).map(|r| self.row_errors(r)).sum();
        total as f64 / (self.rows * self.cols) as f64
    }

    /// The 16 readouts of `address` in measurement `row`.
    pub fn word(&self, row: usize, address: usize) -> u16 {
        let col = address * WORD_BITS;
        assert!(col + WORD_BITS <= self.cols);
        (self.bits[row * self.stride + col / 64] >> (col % 64)) as u16
    }
}
