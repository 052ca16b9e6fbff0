//! Moment relaxations and conic solving for correlation experiments.
//!
//! The crate turns Bell functionals into hierarchies of semidefinite
//! relaxations and solves them with a small deterministic splitting solver.
//! Operator words over measurement effects and auxiliary involutions form
//! the symbolic layer; moment matrices indexed by those words give upper
//! bounds on quantum values, localizing matrices support constrained
//! variants, and a dedicated assembly bounds extraction fidelity from an
//! observed Bell value alone. Steering feasibility of an assemblage is
//! decided by the same solver, and problems can be exchanged with other
//! tools through a plain-text format.

mod moment;
mod solver;
mod word;

pub use moment::{
    localizing_matrix, moment_values, npa_moment_matrix, npa_problem, npa_upper_bound,
    MomentMatrix, MomentRegistry, MomentTerm, NpaRelaxation,
};
pub use solver::{
    solve_sdp, BlockMap, EqRow, SdpProblem, SdpSolution, SolveOptions, SolveStatus, TOTAL_DIM_CAP,
};
pub use word::{effect_letters, words_up_to_level, Symbol, Word};

/// Errors shared by the relaxation builders, the solver, and the exchange
/// format.
#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error(transparent)]
    Hilbert(#[from] dilab_hilbert::HilbertError),
    #[error(transparent)]
    Bell(#[from] dilab_bell::BellError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("total block dimension {dim} exceeds the solver cap {cap}")]
    DimCap { dim: usize, cap: usize },
    #[error("relaxation level {level} is not supported here: {reason}")]
    Level { level: usize, reason: String },
    #[error("value {value} is outside the supported range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("strategy enumeration needs {needed} deterministic strategies, cap is {cap}")]
    StrategyCap { needed: usize, cap: usize },
    #[error("exchange format parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("solver failed to reach its targets: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, SdpError>;
