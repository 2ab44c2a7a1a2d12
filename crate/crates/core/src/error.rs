use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spacing h = {h} is too coarse for a feature of size {feature} (need 4h <= feature)")]
    FeatureTooFine { h: f64, feature: f64 },
    #[error("grid has no interior nodes")]
    EmptyDomain,
    #[error("boundary curvature is undefined at a corner (arc length {y})")]
    UndefinedAtCorner { y: f64 },
    #[error("point ({x}, {y}) lies on a singular locus of the metric")]
    SingularPoint { x: f64, y: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("e^(-2u) overflows at node {node} (u = {u})")]
    Overflow { node: usize, u: f64 },
    #[error("Newton iteration did not converge; residual trace {trace:?}")]
    NewtonDiverged { trace: Vec<f64> },
    #[error("ladder monotonicity violated by {violation:e} between levels {lower} and {upper}")]
    MonotonicityViolated { lower: f64, upper: f64, violation: f64 },
    #[error("ladder stopped at level {level} with probe change {change:e} above tolerance {tol:e}")]
    LadderNotConverged { level: f64, change: f64, tol: f64 },
    #[error("invalid window sequence: {0}")]
    WindowSequenceInvalid(String),
    #[error("dichotomy inconclusive: last decrements {previous:e} and {last:e}")]
    Inconclusive { previous: f64, last: f64 },
    #[error("probe too short: {0}")]
    ProbeTooShort(String),
    #[error("least-squares fit is ill conditioned")]
    FitIllConditioned,
    #[error("nodes {from} and {to} are not connected")]
    Disconnected { from: usize, to: usize },
    #[error("domain is not simply connected")]
    NotSimplyConnected,
    #[error("branch cut passes through node {node}")]
    CutCrossesNode { node: usize },
    #[error("|Phi'| = {modulus:e} is degenerate at node {node}")]
    DerivativeDegenerate { node: usize, modulus: f64 },
    #[error("no admissible value found: {0}")]
    NotFound(String),
    #[error("linear solver failed: {0}")]
    LinearSolve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
