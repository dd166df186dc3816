use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter range violated: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("oscillation is zero; the intrinsic cylinder degenerates")]
    DegenerateOscillation,

    #[error("nonlinear solve did not converge after {iterations} iterations (residual {residual:e}); reduce dt or increase the flux regularization")]
    NonlinearDivergence { iterations: usize, residual: f64 },

    #[error("iterate dropped to {value:e} at node {node}, below the negativity tolerance")]
    Negativity { node: usize, value: f64 },

    #[error("time step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("test function support is not strictly inside the window: {0}")]
    Support(String),

    #[error("no grid point falls inside the cylinder")]
    EmptyCylinder,

    #[error("no grid node falls inside the ball")]
    EmptyBall,

    #[error("time {0} is not a grid time slice")]
    NotOnSlice(f64),

    #[error("normalizing supremum is zero")]
    ZeroSup,

    #[error("region leaves the grid domain: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("measured oscillation {measured} on the starting cylinder exceeds the bound {bound}")]
    InitialOscillationViolated { measured: f64, bound: f64 },

    #[error("oscillation vanishes on some cylinder; field is locally constant")]
    DegenerateFit,

    #[error("need at least {needed} usable radii, got {got}")]
    InsufficientRadii { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
