//! Extraction reports: the state pulled out by an isometry, its overlap with
//! the reference, and the operators the physical measurements turn into.

use crate::{ExtractError, Result};
use dilab_hilbert::{schmidt_decompose, CMat, HilbertError, Ket};
use serde_json::{json, Value};

/// Best-fit reference operator for one extracted image, with the norm of
/// what the fit could not explain.
#[derive(Clone, Debug)]
pub struct ActionFit {
    pub operator: CMat,
    pub residual: f64,
}

/// Extracted images of one measurement setting: a fit per outcome effect,
/// plus a fit for the +/-1 observable when the setting is binary.
#[derive(Clone, Debug)]
pub struct ExtractedAction {
    pub party: usize,
    pub setting: usize,
    pub outcome_fits: Vec<ActionFit>,
    pub observable_fit: Option<ActionFit>,
}

/// Outcome of running an extraction channel on a realization.
#[derive(Clone, Debug)]
pub struct ExtractionReport {
    /// Reduced state on the reference registers after the isometry.
    pub extracted_state: CMat,
    /// Square root of the extracted trace; 1 for any valid isometry.
    pub junk_norm: f64,
    /// Overlap of the extracted state with the maximally entangled state of
    /// the reference dimension.
    pub fidelity: f64,
    /// Global distance between the isometry output and the closest product
    /// of the maximally entangled reference state with a unit junk vector.
    /// Only defined when the input state is pure.
    pub vector_distance: Option<f64>,
    /// Best-fit reference operators for every measurement setting.
    pub per_measurement_actions: Vec<ExtractedAction>,
    /// Weight of the conjugated branch of a phase-kickback extraction.
    pub conjugation_weight: Option<f64>,
    /// Branch weights (00, 01, 10, 11) of the two kickback registers.
    pub branch_weights: Option<[f64; 4]>,
}

impl ExtractionReport {
    /// Overlap of the extracted state with an arbitrary reference target.
    pub fn fidelity_to(&self, target: &Ket) -> Result<f64> {
        if target.dim() != self.extracted_state.rows() {
            return Err(HilbertError::DimMismatch {
                expected: self.extracted_state.rows(),
                got: target.dim(),
            }
            .into());
        }
        Ok(target.expect(&self.extracted_state).re.clamp(0.0, 1.0))
    }

    /// The recorded action for one (party, setting) pair.
    pub fn action(&self, party: usize, setting: usize) -> Option<&ExtractedAction> {
        self.per_measurement_actions
            .iter()
            .find(|a| a.party == party && a.setting == setting)
    }

    /// Check the structural guarantees every extraction must satisfy: the
    /// extracted state is Hermitian positive semidefinite with unit trace.
    pub fn validate(&self) -> Result<()> {
        let rho = &self.extracted_state;
        if !rho.is_psd(1e-8) {
            return Err(HilbertError::NotPsd {
                index: 0,
                min_eig: rho.min_eigenvalue()?,
            }
            .into());
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(ExtractError::Shape(format!(
                "extracted state trace {} deviates from 1",
                tr.re
            )));
        }
        if !(0.0..=1.0 + 1e-12).contains(&self.fidelity) {
            return Err(ExtractError::Shape(format!(
                "fidelity {} outside [0, 1]",
                self.fidelity
            )));
        }
        Ok(())
    }

    /// JSON rendering with every matrix as nested `[re, im]` pairs and all
    /// residuals included.
    pub fn to_json(&self) -> Value {
        json!({
            "extracted_state": mat_json(&self.extracted_state),
            "junk_norm": self.junk_norm,
            "fidelity": self.fidelity,
            "vector_distance": self.vector_distance,
            "conjugation_weight": self.conjugation_weight,
            "branch_weights": self.branch_weights,
            "per_measurement_actions": self
                .per_measurement_actions
                .iter()
                .map(|a| {
                    json!({
                        "party": a.party,
                        "setting": a.setting,
                        "outcome_fits": a
                            .outcome_fits
                            .iter()
                            .map(fit_json)
                            .collect::<Vec<_>>(),
                        "observable_fit": a.observable_fit.as_ref().map(fit_json),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

fn fit_json(f: &ActionFit) -> Value {
    json!({ "operator": mat_json(&f.operator), "residual": f.residual })
}

fn mat_json(m: &CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect();
    json!(rows)
}

/// Fidelity reachable by discarding the devices and preparing the best
/// product state: the square of the largest Schmidt coefficient of the
/// target. The target must live on a product of two equal-dimension factors.
pub fn trivial_fidelity(target: &Ket) -> Result<f64> {
    let d = (target.dim() as f64).sqrt().round() as usize;
    if d * d != target.dim() {
        return Err(ExtractError::Shape(format!(
            "target dimension {} is not a square, so the bipartition is ambiguous",
            target.dim()
        )));
    }
    let (coeffs, _, _) = schmidt_decompose(target, [d, d])?;
    let top = coeffs.iter().cloned().fold(0.0f64, f64::max);
    Ok(top * top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilab_hilbert::{cr, Ket};

    #[test]
    fn trivial_fidelity_of_reference_states() {
        assert!((trivial_fidelity(&Ket::phi_plus()).unwrap() - 0.5).abs() < 1e-12);
        let theta = std::f64::consts::PI / 6.0;
        let mut amps = vec![cr(0.0); 4];
        amps[0] = cr(theta.cos());
        amps[3] = cr(theta.sin());
        let partly = Ket::new(amps).unwrap();
        assert!((trivial_fidelity(&partly).unwrap() - 0.75).abs() < 1e-12);
        let product = Ket::basis(4, 2);
        assert!((trivial_fidelity(&product).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_fidelity_rejects_non_square_dimensions() {
        assert!(trivial_fidelity(&Ket::basis(6, 0)).is_err());
    }
}
