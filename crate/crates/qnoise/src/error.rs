use thiserror::Error;

/// Errors produced by channel construction, metric evaluation, bound
/// computation, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("map is not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid chi matrix: {0}")]
    InvalidChi(String),

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(&'static str),

    #[error("infeasible targets: {0}")]
    InfeasibleTargets(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("exact sequence averaging requires gate-independent noise")]
    GateDependentNoise,

    #[error("no noise assigned to gate {0}")]
    MissingNoise(usize),

    #[error("decay fit failed: {0}")]
    Fit(String),

    #[error("hypothesis violated for matrix {index}: {what}")]
    HypothesisViolated { index: usize, what: String },

    #[error("zero matrix has no coherence angle")]
    ZeroMatrix,

    #[error("malformed channel file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
