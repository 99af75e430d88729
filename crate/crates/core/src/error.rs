//! Error type shared across the crate.

use thiserror::Error;

/// Failure modes of state construction, evolution and solvers.
///
/// Diagnostic payloads are stored as `f64` regardless of the scalar the
/// computation ran at.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock truncation too small: tail mass {tail:.3e} exceeds tolerance {tol:.3e}")]
    TruncationTooSmall { tail: f64, tol: f64 },

    #[error("Fock index {index} out of range for truncation {n_trunc}")]
    IndexOutOfRange { index: usize, n_trunc: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not a valid state: {0}")]
    InvalidState(String),

    #[error("input is not positive semidefinite (eigenvalue floor {floor:.3e})")]
    NonPsdInput { floor: f64 },

    #[error("singular linear system (pivot magnitude {pivot:.3e})")]
    SingularMatrix { pivot: f64 },

    #[error("degenerate interaction time: denominator {denominator:.3e} below threshold")]
    DegenerateTime { denominator: f64 },

    #[error("g2 undefined: mean photon number {mean_n:.3e} is at the vacuum level")]
    VacuumUndefined { mean_n: f64 },

    #[error("phase-space grid too small: state needs half-width {needed:.3}, grid has {got:.3}")]
    GridTooSmall { needed: f64, got: f64 },

    #[error("atom state is not catalytic: residual {delta:.3e} exceeds {tol:.3e}")]
    NotCatalytic { delta: f64, tol: f64 },

    #[error("no PSD fixed point (residual {residual:.3e}); the channel construction is suspect")]
    NoPsdFixedPoint { residual: f64 },

    #[error("no feasible interaction time found for alpha = {alpha}")]
    NoFeasibleTau { alpha: f64 },

    #[error("joint dimension {dim} exceeds the configured budget {budget}")]
    DimensionBudgetExceeded { dim: usize, budget: usize },

    #[error("propagation unstable: PSD floor {floor:.3e} below tolerance (increase truncation)")]
    PropagationUnstable { floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
