use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto its exit-code
/// contract (2 = parse, 3 = validation, 4 = numeric non-convergence).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("the zero polynomial is not a valid discriminant")]
    ZeroPolynomial,

    #[error("row {row} of the action matrix is not a homogeneisation")]
    InvalidActionRow { row: usize },

    #[error("zero-pattern {pattern:?} is not achievable (restricted polynomial vanishes)")]
    UnachievablePattern { pattern: Vec<usize> },

    #[error("pattern enumeration capped at dimension {cap}, got {dim}; supply patterns explicitly")]
    PatternCapExceeded { dim: usize, cap: usize },

    #[error("point lies on the zero locus of the discriminant")]
    OnZeroLocus,

    #[error("configuration is not centred (|sum of points| = {norm:.3e})")]
    NotCentred { norm: f64 },

    #[error("points too close for a valid configuration (margin {margin:.3e})")]
    CoincidentPoints { margin: f64 },

    #[error("numerically multiple roots (margin {margin:.3e} below {tol:.1e})")]
    MultipleRoots { margin: f64, tol: f64 },

    #[error("root finding did not converge within {iters} iterations")]
    RootFindingFailed { iters: usize },

    #[error("symbolic expansion supported only for n <= {cap}, got {n}")]
    ExpansionCapExceeded { n: usize, cap: usize },

    #[error("no critical-configuration catalog available for n = {n} (supported: n <= {cap})")]
    CatalogUnavailable { n: usize, cap: usize },

    #[error("catalog miss: {what}")]
    CatalogMiss { what: String },

    #[error("gradient flow did not converge within {steps} steps (final gradient norm {grad_norm:.3e})")]
    FlowNonConvergence { steps: usize, grad_norm: f64 },

    #[error("computed maximal stabiliser dimension {t} differs from the expected {expected}")]
    StabiliserMismatch { t: usize, expected: usize },

    #[error("invalid polynomial data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
