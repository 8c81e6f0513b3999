use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gauge is unbounded: {0}")]
    UnboundedGauge(String),
    #[error("polar of a non-convex body ({0}) is not supported")]
    NonConvexPolar(&'static str),
    #[error("support function requires a convex body, got {0}")]
    NonConvexBody(&'static str),
    #[error("linear map is singular (|det| = {det:e})")]
    SingularMap { det: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("`{kind}` is not supported by this operation in dimension {n}")]
    UnsupportedKind { kind: &'static str, n: usize },
    #[error("subspace rank {m} is out of range for dimension {n}")]
    BadRank { n: usize, m: usize },
    #[error("numeric overflow in direction {direction:?}")]
    NumericOverflow { direction: Vec<f64> },
    #[error("logarithm of zero gauge in direction {direction:?}")]
    LogOfZero { direction: Vec<f64> },
    #[error("rejection sampling acceptance {acceptance:e} is too low; use hit_and_run")]
    RejectionTooSlow { acceptance: f64 },
    #[error("no convergence after {iterations} iterations (last residual {last:e})")]
    NoConvergence { iterations: usize, last: f64, trace: Vec<f64> },
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("degenerate point set: {0}")]
    DegeneratePoints(String),
    #[error("insufficient contact points: best residual {residual:e}")]
    InsufficientContacts { residual: f64 },
    #[error("measure is not isotropic (residual {residual:e})")]
    NotIsotropic { residual: f64 },
    #[error("facet area computation failed: {0}")]
    FacetAreaFailure(String),
    #[error("containment violated (worst radial ratio {worst_ratio})")]
    ContainmentViolated { worst_ratio: f64 },
    #[error("rank k = {k} is out of range (need k <= {max})")]
    RankOutOfRange { k: usize, max: usize },
    #[error("degenerate polytope after {retries} retries")]
    DegeneratePolytope { retries: usize },
    #[error("linear program failed: {0}")]
    LinearProgram(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
