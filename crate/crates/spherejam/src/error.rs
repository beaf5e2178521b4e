use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid container: {0}")]
    InvalidContainer(String),
    #[error("degenerate pair ({i}, {j}): centers coincide")]
    DegeneratePair { i: usize, j: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("no bracket found along the search direction")]
    NoBracket,
    #[error("perturbation retries exhausted")]
    PerturbExhausted,
    #[error("sampling failure: {0}")]
    SamplingFailure(String),
    #[error("contact graph is empty")]
    EmptyContactGraph,
    #[error("refinement did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("linear program failure: {0}")]
    LpFailure(String),
    #[error("polynomial has no real roots in the search interval")]
    NoRealRoots,
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
