// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Room temperature the switching thresholds are referenced to (°C).
pub const T_REF_C: f64 = 26.0;
/// Manufacturer operating window (°C).
pub const OPERATING_WINDOW_C: (f64, f64) = (0.0, 70.0);

/// Axis-aligned orientation of an external magnetic field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldAxis {
    #[default]
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl FieldAxis {
    pub const ALL: [FieldAxis; 6] = [
        FieldAxis::PosX,
        FieldAxis::NegX,
        FieldAxis::PosY,
        FieldAxis::NegY,
        FieldAxis::PosZ,
        FieldAxis::NegZ,
    ];
}

impl fmt::Display for FieldAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FieldAxis::PosX => "+x",
            FieldAxis::NegX => "-x",
            FieldAxis::PosY => "+y",
            FieldAxis::NegY => "-y",
            FieldAxis::PosZ => "+z",
            FieldAxis::NegZ => "-z",
        };
        f.write_str(s)
    }
}

impl FromStr for FieldAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "+x" | "x" | "posx" => FieldAxis::PosX,
            "-x" | "negx" => FieldAxis::NegX,
            "+y" | "y" | "posy" => FieldAxis::PosY,
            "-y" | "negy" => FieldAxis::NegY,
            "+z" | "z" | "posz" => FieldAxis::PosZ,
            "-z" | "negz" => FieldAxis::NegZ,
            _ => {
                return Err(Error::InvalidEnvironment(format!(
                    "unknown field axis '{s}'"
                )))
            }
        })
    }
}

/// Operating conditions during a measurement campaign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub temperature_c: f64,
    pub field_mt: f64,
    pub field_axis: FieldAxis,
}

impl Environment {
    pub fn new(temperature_c: f64, field_mt: f64, field_axis: FieldAxis) -> Result<Self> {
        let env = Self {
            temperature_c,
            field_mt,
            field_axis,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn room() -> Self {
        Self {
            temperature_c: T_REF_C,
            field_mt: 0.0,
            field_axis: FieldAxis::PosX,
        }
    }

    pub fn at_temperature(temperature_c: f64) -> Result<Self> {
        Self::new(temperature_c, 0.0, FieldAxis::PosX)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = OPERATING_WINDOW_C;
        if !(lo..=hi).contains(&self.temperature_c) {
            return Err(Error::InvalidEnvironment(format!(
                "temperature {} °C outside operating window [{lo}, {hi}]",
                self.temperature_c
            )));
        }
        if !(self.field_mt >= 0.0 && self.field_mt.is_finite()) {
            return Err(Error::InvalidEnvironment(format!(
                "field magnitude must be a non-negative number, got {}",
                self.field_mt
            )));
        }
        Ok(())
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::room()
    }
}
