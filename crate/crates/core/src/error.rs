use thiserror::Error;

/// Errors raised by the solvers, line searches and descent drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertical secant: both points have abscissa {x}")]
    VerticalSecant { x: f64 },

    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("convexity violated at x = {x}: point lies {excess:e} above the chord of its neighbours")]
    ConvexityViolated { x: f64, excess: f64 },

    #[error("objective not finite at x = {x} (value {value})")]
    ObjectiveNotFinite { x: f64, value: f64 },

    #[error("gradient required but the objective has none")]
    GradientUnavailable,

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("iteration cap of {cap} exceeded")]
    IterationCapExceeded { cap: usize },

    #[error("search stalled at x = {x}: next query coincides with a known point")]
    Stalled { x: f64 },

    #[error("objective not eventually increasing along the search direction")]
    NotEventuallyIncreasing,

    #[error("Armijo condition never satisfied (step fell below {floor:e})")]
    ArmijoNeverSatisfied { floor: f64 },

    #[error("metadata required: {0}")]
    MetadataRequired(&'static str),

    #[error("infeasible starting point for the linear minimization oracle")]
    InfeasibleStart,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown benchmark `{name}`; available: {available}")]
    UnknownBenchmark { name: String, available: String },

    #[error("line search failed at descent iteration {iteration}: {source}")]
    LineSearch {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
