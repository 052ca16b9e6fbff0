//! JSON serialization of realizations.
//!
//! Complex entries are `[re, im]` pairs. The state is tagged `ket` or
//! `density`; measurements are nested `[party][setting][outcome]` matrices
//! with the kind inferred from projectivity on load. Doubles round-trip at
//! full precision through the shortest-representation formatter.

use crate::cmat::CMat;
use crate::ket::Ket;
use crate::measurement::{Measurement, MeasurementKind};
use crate::realization::{Realization, State};
use crate::{HilbertError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type JsonComplex = [f64; 2];
type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
enum StateJson {
    Ket(Vec<JsonComplex>),
    Density(JsonMatrix),
}

#[derive(Serialize, Deserialize)]
struct RealizationJson {
    local_dims: Vec<usize>,
    state: StateJson,
    measurements: Vec<Vec<Vec<JsonMatrix>>>,
}

fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat> {
    if rows.is_empty() {
        return Err(HilbertError::Invalid("empty matrix".into()));
    }
    let cols = rows[0].len();
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(HilbertError::Invalid("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(rows.len(), cols, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// Serialize a realization to the interchange schema.
pub fn realization_to_json(r: &Realization) -> String {
    let state = match &r.state {
        State::Ket(k) => StateJson::Ket(k.amps().iter().map(|a| [a.re, a.im]).collect()),
        State::Density(m) => StateJson::Density(matrix_to_json(m)),
    };
    let measurements = r
        .measurements
        .iter()
        .map(|per_party| {
            per_party
                .iter()
                .map(|m| m.outcomes().iter().map(matrix_to_json).collect())
                .collect()
        })
        .collect();
    let doc = RealizationJson {
        local_dims: r.local_dims.clone(),
        state,
        measurements,
    };
    serde_json::to_string_pretty(&doc).expect("realization serialization is infallible")
}

/// Parse and validate a realization from the interchange schema. Measurement
/// kinds are inferred: effect lists that satisfy the projectivity relations
/// load as projective, anything else as a POVM.
pub fn realization_from_json(text: &str) -> Result<Realization> {
    let doc: RealizationJson =
        serde_json::from_str(text).map_err(|e| HilbertError::Invalid(e.to_string()))?;
    let state = match &doc.state {
        StateJson::Ket(amps) => State::Ket(Ket::new(
            amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )?),
        StateJson::Density(rows) => State::Density(matrix_from_json(rows)?),
    };
    let mut measurements = Vec::with_capacity(doc.measurements.len());
    for per_party in &doc.measurements {
        let mut per_setting = Vec::with_capacity(per_party.len());
        for effect_list in per_party {
            let effects: Result<Vec<CMat>> = effect_list.iter().map(matrix_from_json).collect();
            let effects = effects?;
            let m = Measurement::new(effects.clone(), MeasurementKind::Projective)
                .or_else(|_| Measurement::new(effects, MeasurementKind::Povm))?;
            per_setting.push(m);
        }
        measurements.push(per_setting);
    }
    Realization::new(doc.local_dims, state, measurements)
}
