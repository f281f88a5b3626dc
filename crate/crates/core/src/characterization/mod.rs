// SPDX-License-Identifier: Apache-2.0

//! Reduced-timing characterization: measurement matrices, flip counting,
//! threshold selection and the write-pulse sweep.

mod flips;
pub(crate) mod matrix;
mod selection;
mod selection_file;
mod sweep;
mod taxonomy;

pub use flips::{count_flips, FlipCountVector};
pub use matrix::{MeasurementMatrix, WORD_BITS};
pub use selection::{
    expected_threshold, select_cells, suggest_th_l, CellSelection, SelectionThresholds,
};
pub use selection_file::{
    decode_selection, encode_selection, load_selection, save_selection, selection_csv,
    SelectionRecord, SELECTION_FORMAT_VERSION, SELECTION_MAGIC,
};
pub use sweep::{choose_tw, sweep_tw, SweepPoint};
pub use taxonomy::{classify_cells, CellClass, CellTaxonomy, TaxonomyCounts};
