// SPDX-License-Identifier: Apache-2.0

//! Persisted cell selections.
//!
//! Binary layout, little-endian:
//!
//! ```text
//! "MRSL"          4 bytes magic
//! version         u16
//! num_cells       u64
//! n_measurements  u32
//! th_l, th_u      u32, u32
//! count           u64 number of records
//! records         count × (address u64, mask u16), ascending address
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::characterization::flips::FlipCountVector;
use crate::characterization::matrix::WORD_BITS;
use crate::characterization::selection::{CellSelection, SelectionThresholds};
use crate::error::{Error, Result};

pub const SELECTION_MAGIC: &[u8; 4] = b"MRSL";
pub const SELECTION_FORMAT_VERSION: u16 = 1;

/// A selection together with the campaign parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionRecord {
    pub selection: CellSelection,
    pub n_measurements: usize,
    pub thresholds: SelectionThresholds,
}

pub fn encode_selection(rec: &SelectionRecord) -> Vec<u8> {
    let sel = &rec.selection;
    let count = sel.num_rand_addresses();
    let mut out = Vec::with_capacity(34 + count * 10);
    out.extend_from_slice(SELECTION_MAGIC);
    out.extend_from_slice(&SELECTION_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(sel.num_cells() as u64).to_le_bytes());
    out.extend_from_slice(&(rec.n_measurements as u32).to_le_bytes());
    out.extend_from_slice(&rec.thresholds.th_l.to_le_bytes());
    out.extend_from_slice(&rec.thresholds.th_u.to_le_bytes());
    out.extend_from_slice(&(count as u64).to_le_bytes());
    for (a, m) in sel.rand_addresses() {
        out.extend_from_slice(&(a as u64).to_le_bytes());
        out.extend_from_slice(&m.to_le_bytes());
    }
    out
}

fn take<'a>(buf: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let s = buf
        .get(*pos..*pos + n)
        .ok_or_else(|| Error::Format("selection file truncated".into()))?;
    *pos += n;
    Ok(s)
}

fn le<const N: usize>(buf: &[u8], pos: &mut usize) -> Result<[u8; N]> {
    Ok(take(buf, pos, N)?.try_into().expect("length checked"))
}

pub fn decode_selection(bytes: &[u8]) -> Result<SelectionRecord> {
    let mut pos = 0;
    if take(bytes, &mut pos, 4)? != SELECTION_MAGIC {
        return Err(Error::Format("bad magic, not a selection file".into()));
    }
    let version = u16::from_le_bytes(le(bytes, &mut pos)?);
    if version != SELECTION_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported selection file version {version}"
        )));
    }
    let num_cells = u64::from_le_bytes(le(bytes, &mut pos)?) as usize;
    let n_measurements = u32::from_le_bytes(le(bytes, &mut pos)?) as usize;
    let th_l = u32::from_le_bytes(le(bytes, &mut pos)?);
    let th_u = u32::from_le_bytes(le(bytes, &mut pos)?);
    let count = u64::from_le_bytes(le(bytes, &mut pos)?) as usize;
    let thresholds = SelectionThresholds::new(th_l, th_u, n_measurements)?;
    let num_addresses = num_cells.div_ceil(WORD_BITS);
    if count > num_addresses || bytes.len() - pos != count.saturating_mul(10) {
        return Err(Error::Format(
            "selection record count does not match file size".into(),
        ));
    }
    let mut masks = vec![0u16; num_addresses];
    let mut prev: Option<usize> = None;
    for _ in 0..count {
        let a = u64::from_le_bytes(le(bytes, &mut pos)?) as usize;
        let m = u16::from_le_bytes(le(bytes, &mut pos)?);
        if a >= num_addresses || prev.is_some_and(|p| a <= p) || m == 0 {
            return Err(Error::Format(format!(
                "invalid selection record at address {a}"
            )));
        }
        masks[a] = m;
        prev = Some(a);
    }
    Ok(SelectionRecord {
        selection: CellSelection::from_masks(num_cells, masks)
            .map_err(|e| Error::Format(e.to_string()))?,
        n_measurements,
        thresholds,
    })
}

pub fn save_selection(rec: &SelectionRecord, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_selection(rec))?;
    Ok(())
}

pub fn load_selection(path: impl AsRef<Path>) -> Result<SelectionRecord> {
    decode_selection(&std::fs::read(path)?)
}

/// One row per address holding selected cells: address, hex bitmask and the
/// flip count of each of its 16 cells.
pub fn selection_csv(sel: &CellSelection, fc: &FlipCountVector) -> Result<String> {
    if fc.len() != sel.num_cells() {
        return Err(Error::MixedLengths {
            first: sel.num_cells(),
            other: fc.len(),
        });
    }
    let mut s = String::from("address,bitmask");
    for b in 0..WORD_BITS {
        write!(s, ",flip_{b}").unwrap();
    }
    s.push('\n');
    for (a, m) in sel.rand_addresses() {
        write!(s, "{a},0x{m:04X}").unwrap();
        for b in 0..WORD_BITS {
            let c = a * WORD_BITS + b;
            match fc.counts.get(c) {
                Some(v) => write!(s, ",{v}").unwrap(),
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    Ok(s)
}
