//! Measurements as lists of effect operators.

use crate::cmat::CMat;
use crate::{HilbertError, Result, TOL_SPECTRAL};

/// Whether a measurement's effects are projectors or general POVM elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementKind {
    Projective,
    Povm,
}

/// A quantum measurement: one effect operator per outcome. Effects must be
/// positive semidefinite and sum to the identity; projective measurements
/// additionally satisfy M_a M_a' = δ_aa' M_a. POVMs are accepted as data, but
/// operations that rely on projectivity reject them with an explicit error.
#[derive(Clone, Debug)]
pub struct Measurement {
    outcomes: Vec<CMat>,
    kind: MeasurementKind,
}

impl Measurement {
    pub fn new(outcomes: Vec<CMat>, kind: MeasurementKind) -> Result<Self> {
        let m = Self { outcomes, kind };
        m.validate()?;
        Ok(m)
    }

    /// The σz-basis measurement {|0⟩⟨0|, |1⟩⟨1|} generalized to dimension
    /// `dim`: rank-one projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let outcomes = (0..dim)
            .map(|i| crate::Ket::basis(dim, i).projector())
            .collect();
        Self {
            outcomes,
            kind: MeasurementKind::Projective,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.outcomes.is_empty() {
            return Err(HilbertError::Invalid("measurement with no outcomes".into()));
        }
        let d = self.outcomes[0].rows();
        let tol = TOL_SPECTRAL;
        let mut sum = CMat::zeros(d, d);
        for (i, eff) in self.outcomes.iter().enumerate() {
            if !eff.is_square() || eff.rows() != d {
                return Err(HilbertError::DimMismatch {
                    expected: d,
                    got: eff.rows(),
                });
            }
            if !eff.is_finite() {
                return Err(HilbertError::NonFinite);
            }
            let herm = eff.hermitian_residual();
            if herm > tol {
                return Err(HilbertError::NotHermitian { residual: herm });
            }
            let min_eig = eff.min_eigenvalue()?;
            if min_eig < -tol {
                return Err(HilbertError::NotPsd { index: i, min_eig });
            }
            sum = sum.add(eff);
        }
        let res_id = sum.sub(&CMat::identity(d)).op_norm();
        if res_id > tol {
            return Err(HilbertError::NotResolution { residual: res_id });
        }
        if self.kind == MeasurementKind::Projective {
            let mut worst = 0.0f64;
            for (i, a) in self.outcomes.iter().enumerate() {
                for (j, b) in self.outcomes.iter().enumerate() {
                    let prod = a.matmul(b);
                    let expected = if i == j { a.clone() } else { CMat::zeros(d, d) };
                    worst = worst.max(prod.sub(&expected).op_norm());
                }
            }
            if worst > tol {
                return Err(HilbertError::NotProjective { residual: worst });
            }
        }
        Ok(())
    }

    pub fn outcomes(&self) -> &[CMat] {
        &self.outcomes
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].rows()
    }

    pub fn effect(&self, outcome: usize) -> &CMat {
        &self.outcomes[outcome]
    }
}

/// The ±1 observable A = M₊ − M₋ of a binary projective measurement, with
/// outcome 0 mapped to +1. The result is Hermitian and squares to the
/// identity.
pub fn observable_from_measurement(m: &Measurement) -> Result<CMat> {
    if m.num_outcomes() != 2 {
        return Err(HilbertError::Invalid(format!(
            "observable requires a binary measurement, got {} outcomes",
            m.num_outcomes()
        )));
    }
    if m.kind() != MeasurementKind::Projective {
        return Err(HilbertError::NotProjective { residual: f64::NAN });
    }
    Ok(m.outcomes[0].sub(&m.outcomes[1]))
}

/// The inverse map: effects (1 ± A)/2 of a ±1 observable, ordered (+, −).
pub fn effects_from_observable(a: &CMat) -> Result<Measurement> {
    let d = a.rows();
    let res = a.involution_residual();
    if res > 100.0 * TOL_SPECTRAL {
        return Err(HilbertError::NotInvolutory { residual: res });
    }
    let id = CMat::identity(d);
    let plus = id.add(a).scale_re(0.5);
    let minus = id.sub(a).scale_re(0.5);
    Measurement::new(vec![plus, minus], MeasurementKind::Projective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::approx_eq;
    use crate::{cr, pauli, Ket};

    fn plus_minus_basis() -> Measurement {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Ket::new(vec![cr(r), cr(r)]).unwrap().projector();
        let minus = Ket::new(vec![cr(r), cr(-r)]).unwrap().projector();
        Measurement::new(vec![plus, minus], MeasurementKind::Projective).unwrap()
    }

    #[test]
    fn computational_gives_sz() {
        let m = Measurement::computational(2);
        let a = observable_from_measurement(&m).unwrap();
        assert!(approx_eq(&a, &pauli::sz(), 1e-15));
    }

    #[test]
    fn plus_minus_gives_sx() {
        let a = observable_from_measurement(&plus_minus_basis()).unwrap();
        assert!(approx_eq(&a, &pauli::sx(), 1e-12));
    }

    #[test]
    fn observable_round_trip() {
        let m = plus_minus_basis();
        let a = observable_from_measurement(&m).unwrap();
        let back = effects_from_observable(&a).unwrap();
        for (orig, redo) in m.outcomes().iter().zip(back.outcomes()) {
            assert!(approx_eq(orig, redo, 1e-12));
        }
    }

    #[test]
    fn sz_effects() {
        let m = effects_from_observable(&pauli::sz()).unwrap();
        assert!(approx_eq(m.effect(0), &Ket::basis(2, 0).projector(), 1e-15));
        assert!(approx_eq(m.effect(1), &Ket::basis(2, 1).projector(), 1e-15));
    }

    #[test]
    fn povm_accepted_but_not_projective() {
        let id = CMat::identity(2);
        let half = id.scale_re(0.5);
        let povm = Measurement::new(vec![half.clone(), half], MeasurementKind::Povm).unwrap();
        assert_eq!(povm.kind(), MeasurementKind::Povm);
        assert!(observable_from_measurement(&povm).is_err());
        // The same effects mislabeled as projective fail validation.
        let id = CMat::identity(2);
        let half = id.scale_re(0.5);
        assert!(matches!(
            Measurement::new(vec![half.clone(), half], MeasurementKind::Projective),
            Err(HilbertError::NotProjective { .. })
        ));
    }

    #[test]
    fn incomplete_effects_rejected() {
        let p0 = Ket::basis(2, 0).projector();
        assert!(matches!(
            Measurement::new(vec![p0.clone(), p0], MeasurementKind::Povm),
            Err(HilbertError::NotResolution { .. })
        ));
    }
}
