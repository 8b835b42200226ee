//! JSON serialization for measurements and measurement sets.
//!
//! The wire format stores each Kraus operator row-major as `[re, im]` pairs:
//! `{"name": str, "dim": int, "kraus": [[[[re,im], ...], ...], ...]}`. The
//! writer and reader round-trip every floating-point entry bit-exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix};

use super::{KrausMeasurement, MeasurementSet};

/// Wire form of a single measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub name: String,
    pub dim: usize,
    /// `kraus[a][i][j] = [re, im]` of entry `(i, j)` of outcome `a`.
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Wire form of a collection of measurements with prior probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetJson {
    pub measurements: Vec<MeasurementJson>,
    pub priors: Vec<f64>,
}

fn to_wire(m: &KrausMeasurement) -> MeasurementJson {
    let dim = m.dim();
    let kraus = m
        .kraus()
        .iter()
        .map(|op| {
            (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let z = op.get(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    MeasurementJson {
        name: m.name().to_string(),
        dim,
        kraus,
    }
}

fn operators_from_wire(wire: &MeasurementJson) -> Result<Vec<ComplexMatrix>> {
    if wire.dim == 0 {
        return Err(Error::Spec(format!(
            "measurement '{}' declares dimension 0",
            wire.name
        )));
    }
    let mut ops = Vec::with_capacity(wire.kraus.len());
    for (a, rows) in wire.kraus.iter().enumerate() {
        if rows.len() != wire.dim || rows.iter().any(|r| r.len() != wire.dim) {
            return Err(Error::Spec(format!(
                "measurement '{}' outcome {a} is not a {d}x{d} matrix",
                wire.name,
                d = wire.dim
            )));
        }
        let mut op = ComplexMatrix::zeros(wire.dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                op.set(i, j, C64::new(entry[0], entry[1]));
            }
        }
        ops.push(op);
    }
    Ok(ops)
}

/// Serializes one measurement to the JSON wire format.
pub fn measurement_to_json(m: &KrausMeasurement) -> Result<String> {
    serde_json::to_string_pretty(&to_wire(m)).map_err(|e| Error::Spec(e.to_string()))
}

/// Parses and fully validates a measurement (completeness included).
pub fn measurement_from_json(text: &str) -> Result<KrausMeasurement> {
    let wire: MeasurementJson =
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    KrausMeasurement::new(wire.name.clone(), operators_from_wire(&wire)?)
}

/// Parses without the completeness check, so callers can inspect the
/// validation report of a deliberately broken input.
pub fn measurement_from_json_lenient(text: &str) -> Result<KrausMeasurement> {
    let wire: MeasurementJson =
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    KrausMeasurement::new_unchecked(wire.name.clone(), operators_from_wire(&wire)?)
}

/// Serializes a measurement set (measurements plus priors).
pub fn set_to_json(set: &MeasurementSet) -> Result<String> {
    let wire = SetJson {
        measurements: set.measurements().iter().map(to_wire).collect(),
        priors: set.priors().to_vec(),
    };
    serde_json::to_string_pretty(&wire).map_err(|e| Error::Spec(e.to_string()))
}

/// Parses a set without completeness or prior checks, returning the raw
/// measurements and priors so callers can report every violation instead of
/// stopping at the first.
pub fn set_parts_from_json_lenient(text: &str) -> Result<(Vec<KrausMeasurement>, Vec<f64>)> {
    let wire: SetJson = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    let mut measurements = Vec::with_capacity(wire.measurements.len());
    for mw in &wire.measurements {
        measurements.push(KrausMeasurement::new_unchecked(
            mw.name.clone(),
            operators_from_wire(mw)?,
        )?);
    }
    Ok((measurements, wire.priors))
}

/// Parses and validates a measurement set.
pub fn set_from_json(text: &str) -> Result<MeasurementSet> {
    let wire: SetJson = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    let mut measurements = Vec::with_capacity(wire.measurements.len());
    for mw in &wire.measurements {
        measurements.push(KrausMeasurement::new(
            mw.name.clone(),
            operators_from_wire(mw)?,
        )?);
    }
    MeasurementSet::new(measurements, wire.priors)
}
