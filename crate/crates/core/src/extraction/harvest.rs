// SPDX-License-Identifier: Apache-2.0

use crate::characterization::{CellSelection, WORD_BITS};
use crate::device::{ChipModel, DataPattern, Environment, TimingParams};
use crate::error::{Error, Result};
use crate::extraction::bitstream::{Bitstream, Provenance, StreamKind};
use crate::extraction::condition::{sha256, to_hex, BlockParams};

/// Harvest rounds draw from streams above every characterization row index.
pub const HARVEST_STREAM_BASE: u64 = 1 << 32;

/// Hex SHA-256 over the cell count and the `(address, mask)` records.
pub fn selection_digest(sel: &CellSelection) -> String {
    let mut buf = (sel.num_cells() as u64).to_le_bytes().to_vec();
    for (a, m) in sel.rand_addresses() {
        buf.extend_from_slice(&(a as u64).to_le_bytes());
        buf.extend_from_slice(&m.to_le_bytes());
    }
    to_hex(&sha256(&buf))
}

/// Runs `rounds` reset → reduced write → read cycles and appends the readouts
/// of the selected cells in ascending (address, bit) order.
///
/// Only addresses holding selected cells are written; the others would not
/// contribute bits.
pub fn harvest(
    chip: &mut ChipModel,
    sel: &CellSelection,
    pattern: &DataPattern,
    t_w: f64,
    env: &Environment,
    rounds: usize,
) -> Result<Bitstream> {
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter(
            "harvest needs at least one round".into(),
        ));
    }
    if sel.num_cells() != chip.num_cells() {
        return Err(Error::MixedLengths {
            first: chip.num_cells(),
            other: sel.num_cells(),
        });
    }
    let timing = TimingParams::with_write_pulse(t_w)?;
    let targets: Vec<(usize, u16)> = sel.rand_addresses().collect();
    let addrs: Vec<usize> = targets.iter().map(|&(a, _)| a).collect();
    let mut bits = Vec::with_capacity(rounds * sel.num_randcell);
    for round in 0..rounds {
        chip.reset();
        chip.write_addresses(
            &addrs,
            pattern,
            &timing,
            env,
            HARVEST_STREAM_BASE + round as u64,
        )?;
        for &(a, mask) in &targets {
            let word = chip.stored[a];
            bits.extend(
                (0..WORD_BITS)
                    .filter(|b| (mask >> b) & 1 == 1)
                    .map(|b| (word >> b) & 1 == 1),
            );
        }
    }
    Ok(Bitstream {
        bits,
        kind: StreamKind::Raw,
        provenance: Provenance {
            chip_id: chip.chip_id.clone(),
            t_w,
            env: *env,
            selection_digest: selection_digest(sel),
            measurements: rounds,
        },
    })
}

/// Fewest harvest rounds whose full blocks condition to at least
/// `target_bits` output bits.
pub fn required_rounds(
    target_bits: usize,
    sel: &CellSelection,
    params: BlockParams,
) -> Result<usize> {
    params.validate()?;
    if sel.is_empty() {
        return Err(Error::EmptySelection);
    }
    if target_bits < params.d_len {
        return Err(Error::InvalidParameter(format!(
            "target of {target_bits} bits is below one digest ({} bits)",
            params.d_len
        )));
    }
    let blocks = target_bits.div_ceil(params.d_len);
    Ok((blocks * params.b_len).div_ceil(sel.num_randcell))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel_with(n: usize) -> CellSelection {
        let addrs = n.div_ceil(WORD_BITS);
        let mut masks = vec![0u16; addrs];
        for c in 0..n {
            masks[c / WORD_BITS] |= 1 << (c % WORD_BITS);
        }
        CellSelection::from_masks(addrs * WORD_BITS, masks).unwrap()
    }

    #[test]
    fn rounds_formula() {
        let p = BlockParams::default();
        assert_eq!(required_rounds(256, &sel_with(512), p).unwrap(), 1);
        assert_eq!(required_rounds(256, &sel_with(100), p).unwrap(), 6);
        assert_eq!(required_rounds(1024, &sel_with(128), p).unwrap(), 16);
        assert!(required_rounds(100, &sel_with(128), p).is_err());
    }

    #[test]
    fn rounds_is_minimal() {
        let p = BlockParams::default();
        for n in [1, 7, 100, 128, 333, 512, 4000] {
            for target in [256, 300, 1024, 5000] {
                let s = sel_with(n);
                let r = required_rounds(target, &s, p).unwrap();
                let out = |r: usize| (r * n / p.b_len) * p.d_len;
                assert!(out(r) >= target);
                assert!(r == 1 || out(r - 1) < target);
            }
        }
    }

    #[test]
    fn empty_selection_rejected() {
        let empty = CellSelection::from_masks(32, vec![0, 0]).unwrap();
        assert!(matches!(
            required_rounds(256, &empty, BlockParams::default()),
            Err(Error::EmptySelection)
        ));
    }
}
