//! Dense complex linear algebra and the quantum-object layer.
//!
//! Everything in this workspace manipulates finite-dimensional quantum
//! objects: states on small tensor-product Hilbert spaces, projective (or
//! POVM) measurements, and the correlation tables p(a,b|x,y) they induce
//! through the Born rule. This crate owns those representations:
//!
//! * [`CMat`]: dense row-major complex matrices with the usual algebra
//!   (Kronecker products, partial traces, operator predicates).
//! * [`eigh`]: a cyclic Jacobi eigensolver for Hermitian matrices. It is the
//!   single spectral primitive; every predicate (PSD, unitary, projective)
//!   routes through it with one tolerance, [`TOL_SPECTRAL`].
//! * [`Ket`], [`Measurement`], [`Realization`]: states, measurements, and the
//!   "physical experiment" bundle of a state plus per-party measurement sets.
//! * [`born_correlations`]: p(a,b,...|x,y,...) = tr[rho (E_a tensor F_b ...)],
//!   validated for normalization and no-signalling.
//!
//! Dimensions are capped at [`DIM_CAP`] total: the workloads this crate is
//! built for never exceed a few qubits or a pair of qutrits plus ancillas,
//! and the dense algorithms here are chosen for transparency at that scale,
//! not asymptotic performance.

mod cmat;
mod correlations;
mod eig;
mod json;
mod ket;
mod measurement;
mod random;
mod realization;

pub use cmat::{approx_eq, tensor_product, CMat};
pub use correlations::{CorrelationTable, Scenario};
pub use eig::{eigh, Eigh};
pub use json::{realization_from_json, realization_to_json};
pub use ket::{fidelity_and_distance, schmidt_decompose, Ket};
pub use measurement::{
    effects_from_observable, observable_from_measurement, Measurement, MeasurementKind,
};
pub use random::{
    random_ket, random_projective_measurement, random_qubit_observable, random_realization,
    random_two_qubit_projective_realization, random_unitary,
};
pub use realization::{
    apply_werner_noise, born_correlations, purification, Realization, State,
};

pub use num_complex::Complex64;

/// Spectral tolerance: operator predicates (Hermitian, unitary, PSD,
/// projective) hold when the relevant residual is below this in operator
/// norm.
pub const TOL_SPECTRAL: f64 = 1e-10;

/// State tolerance: ket norms and density-matrix traces must be 1 within
/// this.
pub const TOL_STATE: f64 = 1e-10;

/// Probability tolerance: conditional distributions must sum to 1 and
/// no-signalling marginals must agree within this.
pub const TOL_PROB: f64 = 1e-9;

/// Total Hilbert-space dimension guard for tensor products built by this
/// crate.
pub const DIM_CAP: usize = 64;

/// Errors for construction and validation of quantum objects.
#[derive(Debug, thiserror::Error)]
pub enum HilbertError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("total dimension {dim} exceeds the dense-storage cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("operator is not a +/-1 observable (residual {residual:.3e})")]
    NotInvolutory { residual: f64 },
    #[error("measurement is not projective (residual {residual:.3e})")]
    NotProjective { residual: f64 },
    #[error("measurement effects do not resolve the identity (residual {residual:.3e})")]
    NotResolution { residual: f64 },
    #[error("effect {index} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { index: usize, min_eig: f64 },
    #[error("state is not normalized (norm deviation {deviation:.3e})")]
    NotNormalized { deviation: f64 },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, HilbertError>;

/// Shorthand for a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Shorthand for a real complex number.
#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The Pauli matrices and friends, used throughout the reference
/// realizations.
pub mod pauli {
    use super::{c, cr, CMat};

    pub fn sx() -> CMat {
        CMat::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]])
    }

    pub fn sy() -> CMat {
        CMat::from_rows(&[vec![cr(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), cr(0.0)]])
    }

    pub fn sz() -> CMat {
        CMat::from_rows(&[vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(-1.0)]])
    }
}
