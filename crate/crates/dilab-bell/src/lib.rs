//! Bell functionals and figures of merit.
//!
//! A [`BellFunctional`] is a linear functional on correlation tables,
//! stored as a dense coefficient tensor over (outcomes | settings). The crate
//! evaluates functionals on tables ([`evaluate`]), assembles the matching
//! Bell operator for a concrete realization ([`bell_operator`]), and computes
//! exact classical bounds by enumerating deterministic strategies
//! ([`classical_bound`]).
//!
//! Named inequalities beyond CHSH ship as bundled JSON coefficient files
//! (see [`bundled`]); their declared local bounds are re-derived by
//! enumeration every time a file is loaded, so a corrupted data file cannot
//! smuggle in a wrong bound. Reference realizations for CHSH and the tilted
//! CHSH family are built programmatically with their expected values
//! validated through the Born rule at construction.
//!
//! Two further figures of merit live here because they share the evaluation
//! machinery: the random-access-code score ([`rac_score`]) for
//! prepare-and-measure games, and the five-cycle contextuality value
//! ([`kcbs_check`]).

mod classical;
mod data;
mod functional;
mod kcbs;
mod rac;
mod reference;

pub use classical::{classical_bound, deterministic_table};
pub use data::{bundled, bundled_names, functional_from_json};
pub use functional::{bell_operator, evaluate, BellFunctional};
pub use kcbs::{kcbs_check, KcbsReport};
pub use rac::rac_score;
pub use reference::{chsh_reference, tilted_chsh_family, ReferenceRealization};

use dilab_hilbert::HilbertError;

/// Errors from functional evaluation, bound computation, and data loading.
#[derive(Debug, thiserror::Error)]
pub enum BellError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("functional and correlation data belong to different scenarios")]
    ScenarioMismatch,
    #[error("{count} deterministic strategies exceed the enumeration guard {guard}")]
    EnumerationGuard { count: u128, guard: u128 },
    #[error("tilt parameter {0} outside [0, 2)")]
    AlphaOutOfRange(f64),
    #[error("{0}")]
    Shape(String),
    #[error("functional data `{name}`: {detail}")]
    BadData { name: String, detail: String },
}

pub type Result<T> = std::result::Result<T, BellError>;
