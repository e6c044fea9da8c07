//! Human-readable serialization of the synthesized controller: vertex gains
//! and scheduling envelopes for both region laws, dumpable and reloadable so
//! a run can be reproduced without re-synthesis.

use std::path::Path;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::controllers::{FullLoadController, PartialLoadController};
use crate::error::{Error, Result};
use crate::fuzzy::RampPair;
use crate::synthesis::VertexGain;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct GainEntry {
    k_x: [f64; 2],
    k_i: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RampEntry {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct PartialSection {
    omega_ramp: RampEntry,
    wind_ramp: RampEntry,
    torque_max: f64,
    vertices: Vec<GainEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct FullSection {
    omega_ramp: RampEntry,
    pitch_ramp: RampEntry,
    wind_ramp: RampEntry,
    pitch_min: f64,
    pitch_max: f64,
    vertices: Vec<GainEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ControllerFile {
    partial: PartialSection,
    full: FullSection,
}

fn ramp_entry(r: &RampPair) -> RampEntry {
    RampEntry {
        lo: r.lo(),
        hi: r.hi(),
    }
}

fn gain_entry(g: &VertexGain) -> GainEntry {
    GainEntry {
        k_x: [g.k_x[0], g.k_x[1]],
        k_i: g.k_i,
    }
}

fn entry_gain(e: &GainEntry) -> VertexGain {
    VertexGain {
        k_x: Vector2::new(e.k_x[0], e.k_x[1]),
        k_i: e.k_i,
    }
}

/// Serializes both controllers to a TOML string.
pub fn to_toml_string(
    partial: &PartialLoadController,
    full: &FullLoadController,
) -> Result<String> {
    let file = ControllerFile {
        partial: PartialSection {
            omega_ramp: ramp_entry(partial.omega_ramp()),
            wind_ramp: ramp_entry(partial.wind_ramp()),
            torque_max: partial.torque_max(),
            vertices: partial.gains().iter().map(gain_entry).collect(),
        },
        full: FullSection {
            omega_ramp: ramp_entry(full.omega_ramp()),
            pitch_ramp: ramp_entry(full.pitch_ramp()),
            wind_ramp: ramp_entry(full.wind_ramp()),
            pitch_min: full.pitch_range().0,
            pitch_max: full.pitch_range().1,
            vertices: full.gains().iter().map(gain_entry).collect(),
        },
    };
    toml::to_string_pretty(&file)
        .map_err(|e| Error::Config(format!("controller serialization: {e}")))
}

/// Writes both controllers to a TOML file.
pub fn write(
    path: &Path,
    partial: &PartialLoadController,
    full: &FullLoadController,
) -> Result<()> {
    std::fs::write(path, to_toml_string(partial, full)?)?;
    Ok(())
}

/// Parses a controller TOML string back into the two controllers, enforcing
/// vertex counts and the structural zero of the torque law.
pub fn from_toml_string(text: &str) -> Result<(PartialLoadController, FullLoadController)> {
    let file: ControllerFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("controller parse error: {e}")))?;
    let mut partial_gains: Vec<VertexGain> = file.partial.vertices.iter().map(entry_gain).collect();
    for (i, g) in partial_gains.iter_mut().enumerate() {
        if g.k_x[1].abs() > 1e-12 {
            return Err(Error::Config(format!(
                "torque-law vertex {i} carries a pitch gain of {}; expected 0",
                g.k_x[1]
            )));
        }
        // Snap rounding residue from the text round trip to the exact zero
        // the law requires.
        g.k_x[1] = 0.0;
    }
    let partial = PartialLoadController::new(
        partial_gains,
        RampPair::new(file.partial.omega_ramp.lo, file.partial.omega_ramp.hi)?,
        RampPair::new(file.partial.wind_ramp.lo, file.partial.wind_ramp.hi)?,
        file.partial.torque_max,
    )?;
    let full = FullLoadController::new(
        file.full.vertices.iter().map(entry_gain).collect(),
        RampPair::new(file.full.omega_ramp.lo, file.full.omega_ramp.hi)?,
        RampPair::new(file.full.pitch_ramp.lo, file.full.pitch_ramp.hi)?,
        RampPair::new(file.full.wind_ramp.lo, file.full.wind_ramp.hi)?,
        file.full.pitch_min,
        file.full.pitch_max,
    )?;
    Ok((partial, full))
}

/// Reads a controller TOML file.
pub fn read(path: &Path) -> Result<(PartialLoadController, FullLoadController)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!(
            "cannot read controller file {}: {e}",
            path.display()
        ))
    })?;
    from_toml_string(&text)
}
