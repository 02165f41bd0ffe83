use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed domain: {0}")]
    MalformedDomain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not interior to the domain")]
    NotInterior,
    #[error("point is not on the boundary (defect {0:e})")]
    NotBoundary(f64),
    #[error("domain is not properly convex along the requested line")]
    NotProperlyConvex,
    #[error("zero direction")]
    ZeroDirection,
    #[error("singular affine map (condition estimate {0:e})")]
    Singular(f64),
    #[error("empty intersection with the comparison window")]
    EmptyIntersection,
    #[error("operation needs a complex domain")]
    NotComplex,
    #[error("nonconvex samples: D = {0:e}")]
    NonconvexSamples(f64),
    #[error("graph does not connect the query points")]
    Disconnected,
    #[error("no grid node has enough interior margin")]
    EmptyGraph,
    #[error("query point outside the graph window")]
    OutOfWindow,
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("too few points: need {need}, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("triangle sides do not share endpoints")]
    MismatchedEndpoints,
    #[error("kobayashi bracket too wide ({0:.3})")]
    BracketTooWide(f64),
    #[error("normalization search not repeatable (spread {0:e})")]
    NotRepeatable(f64),
    #[error("domain is not in K_d(r): {0}")]
    NotInKdr(String),
    #[error("no separating functional (excess {0:e})")]
    InfeasibleSeparation(f64),
    #[error("point outside the certificate domain")]
    DomainViolation,
    #[error("finite-difference step exceeds the interior margin")]
    StepTooLarge,
    #[error("too few samples: {0}")]
    TooFewSamples(usize),
    #[error("fit did not converge: {0}")]
    FitFailed(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
