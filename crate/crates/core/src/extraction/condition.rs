// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extraction::bitstream::{pack_msb, Bitstream, StreamKind};

/// Hash input and output block sizes in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockParams {
    pub b_len: usize,
    pub d_len: usize,
}

impl Default for BlockParams {
    fn default() -> Self {
        Self::SHA256
    }
}

impl BlockParams {
    pub const SHA256: Self = Self {
        b_len: 512,
        d_len: 256,
    };

    /// Only the SHA-256 pairing is supported.
    pub fn new(b_len: usize, d_len: usize) -> Result<Self> {
        let p = Self { b_len, d_len };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if *self != Self::SHA256 {
            return Err(Error::InvalidParameter(format!(
                "unsupported block sizes {}/{}, expected 512/256",
                self.b_len, self.d_len
            )));
        }
        Ok(())
    }
}

/// SHA-256 of a byte string.
pub fn sha256(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hashes each full `b_len`-bit block independently and concatenates the
/// digests in block order. A trailing partial block is dropped.
pub fn condition(raw: &Bitstream, params: BlockParams) -> Result<Bitstream> {
    params.validate()?;
    if raw.len() < params.b_len {
        return Err(Error::InputTooShort {
            required: params.b_len,
            got: raw.len(),
        });
    }
    let blocks = raw.len() / params.b_len;
    if !raw.len().is_multiple_of(params.b_len) {
        log::debug!("dropping {} trailing raw bits", raw.len() % params.b_len);
    }
    let digests: Vec<[u8; 32]> = raw.bits[..blocks * params.b_len]
        .par_chunks_exact(params.b_len)
        .map(|block| sha256(&pack_msb(block)))
        .collect();
    let bits = digests
        .iter()
        .flat_map(|d| {
            d.iter()
                .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1))
        })
        .collect();
    Ok(Bitstream {
        bits,
        kind: StreamKind::Conditioned,
        provenance: raw.provenance.clone(),
    })
}
