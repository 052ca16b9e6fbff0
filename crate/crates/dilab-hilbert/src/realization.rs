//! Physical experiments: a shared state plus local measurements.

use crate::cmat::CMat;
use crate::correlations::{CorrelationTable, Scenario};
use crate::ket::Ket;
use crate::measurement::Measurement;
use crate::{HilbertError, Result, DIM_CAP, TOL_STATE};
use num_complex::Complex64;

/// The shared state of a realization, either pure or mixed.
#[derive(Clone, Debug)]
pub enum State {
    Ket(Ket),
    Density(CMat),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Ket(k) => k.dim(),
            State::Density(m) => m.rows(),
        }
    }

    /// The state as a density matrix.
    pub fn density(&self) -> CMat {
        match self {
            State::Ket(k) => k.projector(),
            State::Density(m) => m.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            State::Ket(k) => {
                if !k.is_normalized() {
                    return Err(HilbertError::NotNormalized {
                        deviation: (k.norm() - 1.0).abs(),
                    });
                }
                Ok(())
            }
            State::Density(m) => {
                if !m.is_square() {
                    return Err(HilbertError::DimMismatch {
                        expected: m.rows(),
                        got: m.cols(),
                    });
                }
                if !m.is_finite() {
                    return Err(HilbertError::NonFinite);
                }
                let herm = m.hermitian_residual();
                if herm > TOL_STATE {
                    return Err(HilbertError::NotHermitian { residual: herm });
                }
                let min_eig = m.min_eigenvalue()?;
                if min_eig < -TOL_STATE {
                    return Err(HilbertError::NotPsd { index: 0, min_eig });
                }
                let tr = m.trace();
                if (tr.re - 1.0).abs() > TOL_STATE || tr.im.abs() > TOL_STATE {
                    return Err(HilbertError::NotNormalized {
                        deviation: (tr.re - 1.0).abs().max(tr.im.abs()),
                    });
                }
                Ok(())
            }
        }
    }
}

/// A physical experiment: local dimensions, a shared state on the tensor
/// space, and per-party, per-setting measurements.
#[derive(Clone, Debug)]
pub struct Realization {
    pub local_dims: Vec<usize>,
    pub state: State,
    /// `measurements[party][setting]`.
    pub measurements: Vec<Vec<Measurement>>,
}

impl Realization {
    pub fn new(
        local_dims: Vec<usize>,
        state: State,
        measurements: Vec<Vec<Measurement>>,
    ) -> Result<Self> {
        let r = Self {
            local_dims,
            state,
            measurements,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.local_dims.is_empty() || self.local_dims.iter().any(|&d| d == 0) {
            return Err(HilbertError::Invalid("empty or zero local dims".into()));
        }
        let total = self.total_dim();
        if total > DIM_CAP {
            return Err(HilbertError::DimCapExceeded {
                dim: total,
                cap: DIM_CAP,
            });
        }
        self.state.validate()?;
        if self.state.dim() != total {
            return Err(HilbertError::DimMismatch {
                expected: total,
                got: self.state.dim(),
            });
        }
        if self.measurements.len() != self.local_dims.len() {
            return Err(HilbertError::Invalid(
                "measurement table does not match party count".into(),
            ));
        }
        for (p, (per_party, &d)) in self.measurements.iter().zip(&self.local_dims).enumerate() {
            if per_party.is_empty() {
                return Err(HilbertError::Invalid(format!(
                    "party {p} has no measurements"
                )));
            }
            for m in per_party {
                if m.dim() != d {
                    return Err(HilbertError::DimMismatch {
                        expected: d,
                        got: m.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The scenario this realization belongs to.
    pub fn scenario(&self) -> Scenario {
        Scenario {
            settings: self.measurements.iter().map(|s| s.len()).collect(),
            outcomes: self
                .measurements
                .iter()
                .map(|per_party| per_party.iter().map(|m| m.num_outcomes()).collect())
                .collect(),
        }
    }
}

/// Born-rule probabilities of a realization:
/// p(a, b, ... | x, y, ...) = tr[ρ (M_a|x ⊗ N_b|y ⊗ ...)].
pub fn born_correlations(r: &Realization) -> Result<CorrelationTable> {
    r.validate()?;
    let rho = r.state.density();
    let scenario = r.scenario();
    let mut rows = Vec::new();
    for setting in scenario.joint_settings() {
        let mut row = Vec::new();
        for outcome in scenario.joint_outcomes(&setting) {
            let effects: Vec<CMat> = setting
                .iter()
                .zip(&outcome)
                .enumerate()
                .map(|(p, (&x, &a))| r.measurements[p][x].effect(a).clone())
                .collect();
            let joint = crate::cmat::tensor_product(&effects)?;
            let p = rho.matmul(&joint).trace().re;
            row.push(p.clamp(0.0, 1.0));
        }
        rows.push(row);
    }
    CorrelationTable::new(scenario, rows)
}

/// A purification of a density matrix: a ket on the original space tensored
/// with an ancilla whose dimension is the rank of the state. Tracing the
/// ancilla back out recovers the input.
pub fn purification(rho: &CMat) -> Result<(Ket, usize)> {
    if !rho.is_square() {
        return Err(HilbertError::DimMismatch {
            expected: rho.rows(),
            got: rho.cols(),
        });
    }
    let d = rho.rows();
    let eig = crate::eig::eigh(rho)?;
    let support: Vec<usize> = (0..d)
        .filter(|&i| eig.eigenvalues[i] > 1e-12)
        .collect();
    if support.is_empty() {
        return Err(HilbertError::NotNormalized { deviation: 1.0 });
    }
    let rank = support.len();
    // |psi⟩ = Σ_k √λ_k |v_k⟩ ⊗ |k⟩ over the support.
    let mut amps = vec![Complex64::default(); d * rank];
    for (k, &idx) in support.iter().enumerate() {
        let w = eig.eigenvalues[idx].max(0.0).sqrt();
        for r in 0..d {
            amps[r * rank + k] = eig.eigenvectors[(r, idx)] * w;
        }
    }
    let psi = Ket::new_unnormalized(amps).and_then(|k| k.normalize())?;
    Ok((psi, rank))
}

/// Isotropic noise applied to a bipartite pure state of equal local
/// dimensions: v |ψ⟩⟨ψ| + (1 − v) 1/d².
pub fn apply_werner_noise(psi: &Ket, v: f64) -> Result<CMat> {
    if !(0.0..=1.0).contains(&v) {
        return Err(HilbertError::Invalid(format!(
            "visibility {v} outside [0, 1]"
        )));
    }
    let total = psi.dim();
    let d = (total as f64).sqrt().round() as usize;
    if d * d != total {
        return Err(HilbertError::Invalid(format!(
            "state dimension {total} is not a square of a local dimension"
        )));
    }
    let pure = psi.projector().scale_re(v);
    let mixed = CMat::identity(total).scale_re((1.0 - v) / total as f64);
    Ok(pure.add(&mixed))
}
