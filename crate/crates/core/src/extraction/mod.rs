// SPDX-License-Identifier: Apache-2.0

//! Raw bit harvesting from selected cells and SHA-256 block conditioning.

mod bitstream;
mod condition;
mod harvest;

pub use bitstream::{
    decode_binary, encode_binary, from_ascii, load_ascii, load_binary, pack_msb, save_ascii,
    save_binary, to_ascii, unpack_msb, Bitstream, Provenance, StreamKind,
};
pub use condition::{condition, sha256, to_hex, BlockParams};
pub use harvest::{harvest, required_rounds, selection_digest, HARVEST_STREAM_BASE};
