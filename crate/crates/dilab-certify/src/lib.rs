//! Analytic certification of self-testing claims.
//!
//! Three independent certification routes live here. Sum-of-squares
//! decompositions rewrite a shifted Bell operator as an explicit sum of
//! squared measurement polynomials, turning a quantum bound into an operator
//! identity that any realization can check, and turning a near-maximal
//! violation into norm bounds on each polynomial applied to the state.
//! Commutation certificates measure the effective incompatibility of a pair
//! of binary observables on the reduced state. Operator-inequality robustness
//! lines certify fidelity lower bounds of the form s*beta + mu by checking
//! positivity of a channel-dependent operator across a grid of measurement
//! angles.

use dilab_bell::BellError;
use dilab_hilbert::HilbertError;
use thiserror::Error;

mod commutation;
mod robust;
mod sos;

pub use commutation::commutation_certificate;
pub use robust::{
    conservative_line_coefficients, default_line_coefficients, fidelity_lower_line,
    nontrivial_violation_threshold, operator_inequality_certify, ExtractionChannel, RobustLine,
};
pub use sos::{
    chsh_sos, sos_residuals, sos_verify, OperatorPolynomial, SosCertificate, SosResiduals,
};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("word letter (party {party}, setting {setting}) does not exist in the realization")]
    InvalidWord { party: usize, setting: usize },
    #[error("functional value {value} exceeds the declared quantum bound {bound}")]
    AboveQuantumBound { value: f64, bound: f64 },
    #[error("robustness line (s = {s}, mu = {mu}) is not certified")]
    Uncertified { s: f64, mu: f64 },
    #[error("{0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, CertifyError>;
