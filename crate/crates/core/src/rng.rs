// SPDX-License-Identifier: Apache-2.0

//! Counter-based random streams.
//!
//! Every random draw in the simulator is a pure function of
//! `(seed, lane, stream, counter)`. Lanes are cell or address indices and
//! streams are measurement indices, so any subset of cells can be evaluated
//! in any order (or in parallel) and still see the same numbers.

use rand::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Domain tags separating independent uses of the same `(seed, lane)`.
pub mod domain {
    pub const WORD_PARAMS: u64 = 0x5752_4450;
    pub const CELL_PARAMS: u64 = 0x4345_4c4c;
    pub const WRITE: u64 = 0x5752_4954;
    pub const PATTERN: u64 = 0x5041_5454;
}

#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit key from the stream coordinates.
#[inline(always)]
pub fn key(seed: u64, domain: u64, lane: u64, stream: u64) -> u64 {
    let a = mix64(seed ^ mix64(domain.wrapping_mul(GOLDEN)));
    let b = mix64(a ^ lane.wrapping_mul(0xd6e8_feb8_6659_fd93));
    mix64(
        b ^ stream
            .wrapping_mul(0xa076_1d64_78bd_642f)
            .wrapping_add(GOLDEN),
    )
}

/// The `counter`-th 64-bit output of the stream identified by `key`.
#[inline(always)]
pub fn draw(key: u64, counter: u64) -> u64 {
    mix64(key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
#[inline(always)]
pub fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A sequential view over one counter-based stream, usable with `rand_distr`.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, domain: u64, lane: u64, stream: u64) -> Self {
        Self {
            key: key(seed, domain, lane, stream),
            counter: 0,
        }
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = draw(self.key, self.counter);
        self.counter += 1;
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}
