use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// State vector length or operator dimension does not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Squared norm deviates from 1 by more than the configured tolerance.
    #[error("state is not normalized: squared-norm deficit {deficit:.3e} exceeds tolerance {tol:.1e}")]
    NotNormalized { deficit: f64, tol: f64 },

    /// Total Hilbert-space dimension exceeds the configured cap.
    #[error("total dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// Subsystem count outside the supported 2..=3 range.
    #[error("expected {expected} subsystems, state has {got}")]
    SubsystemCount { expected: usize, got: usize },

    /// A matrix expected to be unitary fails u†u = 1.
    #[error("matrix is not unitary: deviation {0:.3e}")]
    NotUnitary(f64),

    /// Referenced subsystem label does not exist on this state.
    #[error("unknown subsystem {0:?} for this state")]
    UnknownSubsystem(crate::state::Side),

    /// Envariance was required but does not hold.
    #[error("state is not envariant under the given unitary (residual {residual:.3e})")]
    NotEnvariant { residual: f64 },

    /// Swap pair with unequal Schmidt coefficients.
    #[error("branches {k} and {l} are not envariantly swappable: coefficient gap {gap:.3e}")]
    NotSwappable { k: usize, l: usize, gap: f64 },

    /// Index out of range for the requested side.
    #[error("outcome index {index} out of range for dimension {dim}")]
    OutcomeRange { index: usize, dim: usize },

    /// Phase list length does not match Schmidt rank.
    #[error("expected {expected} phases, got {got}")]
    PhaseCount { expected: usize, got: usize },

    /// Named ruleset is not known and no custom definition was given.
    #[error("unknown ruleset {0:?}")]
    UnknownRuleset(String),

    /// A protocol trace assertion failed, so constraints cannot be emitted.
    #[error("trace assertion failed at step {step}: {what}")]
    TraceAssertion { step: usize, what: String },

    /// Exact rational annotation required but absent or inconsistent.
    #[error("exact rational annotation required: {0}")]
    ExactRequired(String),

    /// Exact-mode operation on a state with nontrivial phases.
    #[error("amplitudes carry phases; scrub them before fine-graining")]
    PhasesPresent,

    /// Rational approximation cannot reach the requested tolerance.
    #[error("no rational approximation with denominator <= {m_max} reaches epsilon {epsilon:.3e} (best deviation {best:.3e})")]
    ApportionmentUnachievable { epsilon: f64, m_max: u64, best: f64 },

    /// Measurement context does not contain the required basis vector.
    #[error("context {context} does not contain the Schmidt vector for branch {branch} (best overlap {overlap:.6})")]
    ContextMissingVector { context: usize, branch: usize, overlap: f64 },

    /// Malformed input document.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
