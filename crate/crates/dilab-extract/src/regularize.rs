//! Regularization of Hermitian operators into binary observables.
//!
//! Sums like (A0 + A1)/sqrt(2) of physical observables are Hermitian but not
//! unitary, so they cannot control a swap gate directly. Regularization
//! replaces the spectrum by its signs, sending zero eigenvalues to +1, which
//! yields the closest binary observable while leaving every eigenvector
//! untouched.

use crate::{ExtractError, Result};
use dilab_hilbert::{eigh, tensor_product, CMat, HilbertError, Ket};

/// A Hermitian operator next to its sign-regularized form.
#[derive(Clone, Debug)]
pub struct RegularizedObservable {
    pub original: CMat,
    pub regularized: CMat,
    /// Number of eigenvalues that were rounded up from (numerically) zero.
    pub kernel_dim: usize,
    /// Norm of (regularized - original) applied to the supplied state, when
    /// a state was supplied.
    pub action_residual: Option<f64>,
}

/// Relative threshold below which an eigenvalue counts as zero.
const KERNEL_CUT: f64 = 1e-10;

/// Replace the spectrum of a Hermitian operator by its signs; zero
/// eigenvalues become +1. The optional state must live on the same space and
/// is only used to measure how much the replacement moves it.
pub fn regularize(z: &CMat, psi: Option<&Ket>) -> Result<RegularizedObservable> {
    if !z.is_square() {
        return Err(HilbertError::DimMismatch {
            expected: z.rows(),
            got: z.cols(),
        }
        .into());
    }
    let scale = z.op_norm();
    let herm = z.hermitian_residual();
    if herm > 1e-8 * scale.max(1.0) {
        return Err(HilbertError::NotHermitian { residual: herm }.into());
    }
    let eig = eigh(z)?;
    let cut = KERNEL_CUT * scale;
    let kernel_dim = eig
        .eigenvalues
        .iter()
        .filter(|l| l.abs() <= cut)
        .count();
    let regularized = eig
        .apply_spectrum(|l| if l.abs() <= cut || l > 0.0 { 1.0 } else { -1.0 })
        .hermitize();
    let action_residual = match psi {
        None => None,
        Some(state) => {
            if state.dim() != z.rows() {
                return Err(HilbertError::DimMismatch {
                    expected: z.rows(),
                    got: state.dim(),
                }
                .into());
            }
            let moved = state.apply(&regularized.sub(z));
            Some(moved.norm())
        }
    };
    Ok(RegularizedObservable {
        original: z.clone(),
        regularized,
        kernel_dim,
        action_residual,
    })
}

/// Extend a single-party operator to the full product space by tensoring
/// identities around it: `party` indexes into `local_dims`.
pub fn embed_local(op: &CMat, local_dims: &[usize], party: usize) -> Result<CMat> {
    if party >= local_dims.len() {
        return Err(ExtractError::Shape(format!(
            "party {party} out of range for {} parties",
            local_dims.len()
        )));
    }
    if op.rows() != local_dims[party] || op.cols() != local_dims[party] {
        return Err(HilbertError::DimMismatch {
            expected: local_dims[party],
            got: op.rows(),
        }
        .into());
    }
    let factors: Vec<CMat> = local_dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == party {
                op.clone()
            } else {
                CMat::identity(d)
            }
        })
        .collect();
    Ok(tensor_product(&factors)?)
}
