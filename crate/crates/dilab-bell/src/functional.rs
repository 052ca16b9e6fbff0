//! The Bell functional type, evaluation, and Bell operators.

use crate::{BellError, Result};
use dilab_hilbert::{tensor_product, CMat, CorrelationTable, Realization, Scenario};
use serde::{Deserialize, Serialize};

/// A linear functional on correlation tables: value = sum of
/// `coeffs[setting][outcome] * p(outcome | setting)` over the dense table.
/// Bounds are optional; when both are declared the local bound may not exceed
/// the quantum bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BellFunctional {
    pub name: String,
    pub scenario: Scenario,
    /// `coeffs[flat_setting][flat_outcome]`, both indices row-major over
    /// parties, matching the correlation-table layout.
    pub coeffs: Vec<Vec<f64>>,
    pub local_bound: Option<f64>,
    pub quantum_bound: Option<f64>,
    #[serde(default)]
    pub notes: String,
}

impl BellFunctional {
    pub fn new(
        name: impl Into<String>,
        scenario: Scenario,
        coeffs: Vec<Vec<f64>>,
        local_bound: Option<f64>,
        quantum_bound: Option<f64>,
    ) -> Result<Self> {
        let f = Self {
            name: name.into(),
            scenario,
            coeffs,
            local_bound,
            quantum_bound,
            notes: String::new(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let settings = self.scenario.joint_settings();
        if self.coeffs.len() != settings.len() {
            return Err(BellError::Shape(format!(
                "functional `{}` has {} coefficient rows for {} joint settings",
                self.name,
                self.coeffs.len(),
                settings.len()
            )));
        }
        for (row, setting) in self.coeffs.iter().zip(&settings) {
            let want = self.scenario.joint_outcomes(setting).len();
            if row.len() != want {
                return Err(BellError::Shape(format!(
                    "functional `{}` setting {:?} has {} coefficients, expected {}",
                    self.name,
                    setting,
                    row.len(),
                    want
                )));
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(BellError::Shape(format!(
                    "functional `{}` has non-finite coefficients",
                    self.name
                )));
            }
        }
        if let (Some(l), Some(q)) = (self.local_bound, self.quantum_bound) {
            if l > q + 1e-9 {
                return Err(BellError::Shape(format!(
                    "functional `{}` declares local bound {l} above quantum bound {q}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Evaluate a functional on a correlation table from the same scenario.
pub fn evaluate(f: &BellFunctional, table: &CorrelationTable) -> Result<f64> {
    if f.scenario != table.scenario {
        return Err(BellError::ScenarioMismatch);
    }
    let mut acc = 0.0;
    for (crow, prow) in f.coeffs.iter().zip(table.rows()) {
        for (w, p) in crow.iter().zip(prow) {
            acc += w * p;
        }
    }
    Ok(acc)
}

/// The Bell operator B = sum of `w[setting][outcome]` times the tensor
/// product of the parties' effects, for fixed measurements. The state
/// expectation of B reproduces `evaluate` on the Born table of the same
/// realization.
pub fn bell_operator(f: &BellFunctional, r: &Realization) -> Result<CMat> {
    if f.scenario != r.scenario() {
        return Err(BellError::ScenarioMismatch);
    }
    let dim = r.total_dim();
    let mut b = CMat::zeros(dim, dim);
    for (si, setting) in f.scenario.joint_settings().iter().enumerate() {
        for (oi, outcome) in f.scenario.joint_outcomes(setting).iter().enumerate() {
            let w = f.coeffs[si][oi];
            if w == 0.0 {
                continue;
            }
            let effects: Vec<CMat> = setting
                .iter()
                .zip(outcome)
                .enumerate()
                .map(|(p, (&x, &a))| r.measurements[p][x].effect(a).clone())
                .collect();
            b = b.add(&tensor_product(&effects)?.scale_re(w));
        }
    }
    Ok(b.hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use dilab_hilbert::{born_correlations, State};

    #[test]
    fn shape_validation() {
        let sc = Scenario::uniform(2, 2, 2);
        assert!(BellFunctional::new("bad", sc.clone(), vec![vec![0.0; 4]; 3], None, None).is_err());
        assert!(BellFunctional::new("bad", sc.clone(), vec![vec![0.0; 3]; 4], None, None).is_err());
        assert!(BellFunctional::new("ok", sc, vec![vec![0.0; 4]; 4], None, None).is_ok());
    }

    #[test]
    fn inconsistent_bounds_rejected() {
        let sc = Scenario::uniform(2, 2, 2);
        let err = BellFunctional::new("bad", sc, vec![vec![0.0; 4]; 4], Some(3.0), Some(2.0));
        assert!(err.is_err());
    }

    #[test]
    fn zero_functional_gives_zero_operator() {
        let sc = Scenario::uniform(2, 2, 2);
        let f = BellFunctional::new("zero", sc, vec![vec![0.0; 4]; 4], None, None).unwrap();
        let r = crate::chsh_reference().realization;
        let b = bell_operator(&f, &r).unwrap();
        assert!(b.norm_fro() < 1e-15);
    }

    #[test]
    fn operator_expectation_matches_evaluate() {
        let f = bundled("chsh").unwrap();
        let r = crate::chsh_reference().realization;
        let b = bell_operator(&f, &r).unwrap();
        let table = born_correlations(&r).unwrap();
        let via_table = evaluate(&f, &table).unwrap();
        let via_operator = match &r.state {
            State::Ket(k) => k.expect(&b).re,
            State::Density(m) => m.matmul(&b).trace().re,
        };
        assert!((via_table - via_operator).abs() < 1e-10);
    }
}
