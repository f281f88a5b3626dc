// SPDX-License-Identifier: Apache-2.0

//! Bit sequences and their on-disk forms.
//!
//! Binary: `u64` little-endian bit length, then the bits packed MSB-first,
//! the final byte zero-padded. ASCII: one `'0'`/`'1'` byte per bit, no
//! separators.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::Environment;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKind {
    Raw,
    Conditioned,
}

/// Where a stream came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub chip_id: String,
    pub t_w: f64,
    pub env: Environment,
    /// Hex SHA-256 of the selection the bits were harvested from.
    pub selection_digest: String,
    /// Harvest rounds (reduced-timing measurements) that produced the bits.
    pub measurements: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bitstream {
    #[serde(skip)]
    pub bits: Vec<bool>,
    pub kind: StreamKind,
    pub provenance: Provenance,
}

impl Bitstream {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Provenance and kind as pretty JSON, for a sidecar next to the bits.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bitstream metadata serializes")
    }
}

/// Packs bits MSB-first; the last byte is zero-padded.
pub fn pack_msb(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect()
}

pub fn unpack_msb(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
        .collect()
}

pub fn encode_binary(bits: &[bool]) -> Vec<u8> {
    let mut out = (bits.len() as u64).to_le_bytes().to_vec();
    out.extend(pack_msb(bits));
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Vec<bool>> {
    let header: [u8; 8] = bytes
        .get(..8)
        .ok_or_else(|| Error::Format("bitstream header truncated".into()))?
        .try_into()
        .expect("length checked");
    let len = u64::from_le_bytes(header);
    let body = &bytes[8..];
    if len.div_ceil(8) != body.len() as u64 {
        return Err(Error::Format(format!(
            "bit length {len} does not match {} payload bytes",
            body.len()
        )));
    }
    Ok(unpack_msb(body, len as usize))
}

pub fn to_ascii(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| if b { b'1' } else { b'0' }).collect()
}

pub fn from_ascii(bytes: &[u8]) -> Result<Vec<bool>> {
    bytes
        .iter()
        .enumerate()
        .map(|(i, &c)| match c {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(Error::Format(format!(
                "unexpected byte 0x{c:02x} at offset {i}"
            ))),
        })
        .collect()
}

pub fn save_binary(bits: &[bool], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_binary(bits))?;
    Ok(())
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    decode_binary(&std::fs::read(path)?)
}

pub fn save_ascii(bits: &[bool], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_ascii(bits))?;
    Ok(())
}

pub fn load_ascii(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    from_ascii(&std::fs::read(path)?)
}
