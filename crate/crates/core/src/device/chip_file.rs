// SPDX-License-Identifier: Apache-2.0

//! Versioned binary chip file.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! "MRTG"            4 bytes magic
//! version           u16
//! chip_id           u32 byte length + UTF-8 bytes
//! num_addresses     u64
//! word_width        u16 (always 16)
//! cells             num_addresses * 16 × (tau_ns, steepness, metastable_frac, metastable_bias) f64
//! stored            num_addresses × u16
//! temp_tau_slope    f64
//! field_threshold   f64
//! seed              u64
//! ```

use std::io::{Read, Write};
use std::path::Path;

use crate::characterization::matrix::WORD_BITS;
use crate::device::chip::{CellParams, ChipModel};
use crate::device::config::EnvCoeffs;
use crate::error::{Error, Result};

pub const CHIP_MAGIC: &[u8; 4] = b"MRTG";
pub const CHIP_FORMAT_VERSION: u16 = 1;

pub fn encode_chip(chip: &ChipModel) -> Vec<u8> {
    let id = chip.chip_id.as_bytes();
    let mut out = Vec::with_capacity(64 + chip.cells.len() * 32 + chip.stored.len() * 2);
    out.extend_from_slice(CHIP_MAGIC);
    out.extend_from_slice(&CHIP_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(id.len() as u32).to_le_bytes());
    out.extend_from_slice(id);
    out.extend_from_slice(&(chip.num_addresses as u64).to_le_bytes());
    out.extend_from_slice(&(WORD_BITS as u16).to_le_bytes());
    for c in &chip.cells {
        for v in [c.tau_ns, c.steepness, c.metastable_frac, c.metastable_bias] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for w in &chip.stored {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out.extend_from_slice(&chip.env_coeffs.temp_tau_slope.to_le_bytes());
    out.extend_from_slice(&chip.env_coeffs.field_threshold_mt.to_le_bytes());
    out.extend_from_slice(&chip.seed.to_le_bytes());
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format("chip file truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

pub fn decode_chip(bytes: &[u8]) -> Result<ChipModel> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4)? != CHIP_MAGIC {
        return Err(Error::Format("bad magic, not a chip file".into()));
    }
    let version = c.u16()?;
    if version != CHIP_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported chip file version {version}"
        )));
    }
    let id_len = c.u32()? as usize;
    let chip_id = std::str::from_utf8(c.take(id_len)?)
        .map_err(|_| Error::Format("chip id is not UTF-8".into()))?
        .to_owned();
    let num_addresses =
        usize::try_from(c.u64()?).map_err(|_| Error::Format("address count overflows".into()))?;
    let width = c.u16()? as usize;
    if width != WORD_BITS {
        return Err(Error::Format(format!("unsupported word width {width}")));
    }
    let num_cells = num_addresses
        .checked_mul(WORD_BITS)
        .ok_or_else(|| Error::Format("cell count overflows".into()))?;
    // reject absurd sizes before allocating
    if bytes.len() < num_cells.saturating_mul(32) {
        return Err(Error::Format("chip file truncated".into()));
    }
    let mut cells = Vec::with_capacity(num_cells);
    for _ in 0..num_cells {
        cells.push(CellParams {
            tau_ns: c.f64()?,
            steepness: c.f64()?,
            metastable_frac: c.f64()?,
            metastable_bias: c.f64()?,
        });
    }
    let stored = (0..num_addresses)
        .map(|_| c.u16())
        .collect::<Result<Vec<_>>>()?;
    let env_coeffs = EnvCoeffs {
        temp_tau_slope: c.f64()?,
        field_threshold_mt: c.f64()?,
    };
    let seed = c.u64()?;
    if c.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after chip record".into()));
    }
    Ok(ChipModel {
        chip_id,
        num_addresses,
        cells,
        stored,
        env_coeffs,
        seed,
    })
}

pub fn save_chip(chip: &ChipModel, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_chip(chip))?;
    f.flush()?;
    Ok(())
}

pub fn load_chip(path: impl AsRef<Path>) -> Result<ChipModel> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_chip(&buf)
}
