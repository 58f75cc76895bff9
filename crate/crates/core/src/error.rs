use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polyhedron contains a line: halfspace normals do not span R^{0}")]
    Lineality(usize),
    #[error("polyhedron is empty")]
    Empty,
    #[error("invalid halfspace: {0}")]
    InvalidHalfspace(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ordering cone is not pointed")]
    NotPointed,
    #[error("ordering cone is not solid")]
    NotSolid,
    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("problem is infeasible (best phase-1 slack {0:.3e})")]
    Infeasible(f64),
    #[error("interior-point solver hit the Newton step limit ({0})")]
    MaxIterations(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),

    #[error("scalarization at distance {distance:.3e} returned a vanishing dual vector")]
    DualDegenerate { distance: f64 },
    #[error("halfspace normal degenerates to zero")]
    DegenerateNormal,
    #[error("box enumeration needs 2^{0} corners; at most 2^20 supported")]
    DimensionTooLarge(usize),
    #[error("iteration limit {0} reached before the outer approximation was certified")]
    IterationLimit(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sampling starved: accepted {accepted} of {attempts} draws")]
    SamplingStarved { accepted: usize, attempts: usize },

    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
