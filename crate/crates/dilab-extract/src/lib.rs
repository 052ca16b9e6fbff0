//! Extraction side of self-testing: given a realization whose statistics
//! certify a reference experiment, build the local channels that pull the
//! reference state and measurements out of the physical devices, and report
//! how well the extraction succeeded.
//!
//! The toolbox covers the swap isometry for binary observables and its
//! qudit and phase-kickback generalizations, the regularization that turns
//! sums of observables into unitaries, Jordan-lemma block decompositions of
//! pairs of binary observables, and the one-parameter dephasing channels
//! used by robustness bounds.

use thiserror::Error;

mod channels;
mod jordan;
mod kickback;
mod qudit;
mod regularize;
mod report;
mod swap;

pub use channels::{
    apply_dephasing, dephasing_axes, dephasing_extraction, dephasing_weight,
    prepare_and_discard_fidelity,
};
pub use jordan::{jordan_block_decompose, JordanBlock, JordanBlocks};
pub use kickback::{phase_kickback_extract, phase_kickback_image};
pub use qudit::{ideal_clock, ideal_shift_family, qudit_swap_extract, QuditSwapOperators};
pub use regularize::{embed_local, regularize, RegularizedObservable};
pub use report::{trivial_fidelity, ActionFit, ExtractedAction, ExtractionReport};
pub use swap::{
    chsh_swap_operators, extract_measurement_action, full_party_circuit, party_circuit,
    swap_extract, swap_extract_with_ancillas, swap_image, tilted_swap_operators, SwapOperators,
};

use dilab_hilbert::HilbertError;

/// Errors produced by extraction channels.
#[derive(Debug, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("swap building block is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("angle {angle} is outside [0, pi/2]")]
    AngleOutOfRange { angle: f64 },
    #[error(
        "generalized swap condition {condition} fails at index {index} (residual {residual:.3e})"
    )]
    SwapCondition {
        condition: u8,
        index: usize,
        residual: f64,
    },
    #[error(
        "party {party} observables {first} and {second} do not anticommute on the state (residual {residual:.3e})"
    )]
    Anticommutation {
        party: usize,
        first: usize,
        second: usize,
        residual: f64,
    },
    #[error("{0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, ExtractError>;
