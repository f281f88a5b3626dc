// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Addresses per physical row, used by the striped pattern.
pub const ROW_WORDS: usize = 64;

/// Data written to every address of a campaign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataPattern {
    Solid {
        word: u16,
    },
    /// Alternates per address.
    Checkerboard {
        word_a: u16,
        word_b: u16,
    },
    /// Alternates per row of [`ROW_WORDS`] addresses.
    Striped {
        word_a: u16,
        word_b: u16,
    },
    Random {
        seed: u64,
    },
}

impl DataPattern {
    pub const fn solid(word: u16) -> Self {
        DataPattern::Solid { word }
    }

    pub fn word_at(&self, address: usize) -> u16 {
        match *self {
            DataPattern::Solid { word } => word,
            DataPattern::Checkerboard { word_a, word_b } => {
                if address.is_multiple_of(2) {
                    word_a
                } else {
                    word_b
                }
            }
            DataPattern::Striped { word_a, word_b } => {
                if (address / ROW_WORDS).is_multiple_of(2) {
                    word_a
                } else {
                    word_b
                }
            }
            DataPattern::Random { seed } => {
                let k = rng::key(seed, rng::domain::PATTERN, address as u64, 0);
                (rng::draw(k, 0) >> 48) as u16
            }
        }
    }

    pub fn expand(&self, start: usize, end: usize) -> Vec<u16> {
        (start..end).map(|a| self.word_at(a)).collect()
    }
}

impl fmt::Display for DataPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataPattern::Solid { word } => write!(f, "solid:0x{word:04X}"),
            DataPattern::Checkerboard { word_a, word_b } => {
                write!(f, "checkerboard:0x{word_a:04X}:0x{word_b:04X}")
            }
            DataPattern::Striped { word_a, word_b } => {
                write!(f, "striped:0x{word_a:04X}:0x{word_b:04X}")
            }
            DataPattern::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

fn parse_word(s: &str) -> Result<u16> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u16::from_str_radix(hex, 16),
        None => t.parse::<u16>(),
    };
    r.map_err(|_| Error::InvalidParameter(format!("bad 16-bit word '{s}'")))
}

impl FromStr for DataPattern {
    type Err = Error;

    /// Accepts `solid:0x0000`, `checkerboard:0xAAAA:0x5555`,
    /// `striped:0xFFFF:0x0000` and `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["solid", w] => Ok(DataPattern::Solid {
                word: parse_word(w)?,
            }),
            ["checkerboard", a, b] => Ok(DataPattern::Checkerboard {
                word_a: parse_word(a)?,
                word_b: parse_word(b)?,
            }),
            ["striped", a, b] => Ok(DataPattern::Striped {
                word_a: parse_word(a)?,
                word_b: parse_word(b)?,
            }),
            ["random", seed] => Ok(DataPattern::Random {
                seed: seed
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad pattern seed '{seed}'")))?,
            }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown data pattern '{s}'"
            ))),
        }
    }
}
