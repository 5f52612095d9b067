use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Trace condition |tr| > 2 fails, so the element has no axis.
    #[error("element is not hyperbolic: |trace| = {trace_abs} <= 2")]
    NonHyperbolicElement { trace_abs: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    /// A vertex cycle word failed to close up to the identity tolerance, or
    /// its angle sum is not a full turn. The polygon data is inconsistent.
    #[error("vertex cycle failure: {0}")]
    VertexCycleFailure(String),

    #[error("enumeration budget exceeded: kept {kept} elements, cap {cap}")]
    BudgetExceeded { kept: usize, cap: usize },

    /// Three or more coordinates inside one merge threshold; pair merging
    /// would be order-dependent so the caller must decide.
    #[error("three coordinates within {threshold} starting at {first}; pair merge is ambiguous")]
    TripleCluster { threshold: f64, first: f64 },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("parameter order violated: {0}")]
    ParamOrder(String),

    #[error("input not {delta}-separated: found pair at distance {found}")]
    NotSeparatedInput { delta: f64, found: f64 },

    #[error("input set is not Delone on the region: {0}")]
    NotDeloneOnA(String),

    #[error("not found within budget: {0}")]
    NotFoundWithinBudget(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
