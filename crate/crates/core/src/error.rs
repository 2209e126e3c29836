use thiserror::Error;

/// Errors raised by the state primitives, the task modules and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fidelity {value} outside the admissible range ({low}, {high}]")]
    FidelityOutOfDomain { value: f64, low: f64, high: f64 },

    #[error(
        "fidelity {g} at or below the singular boundary {boundary}: \
         required copies diverge as g -> {boundary}+"
    )]
    Singular { g: f64, boundary: f64 },

    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("exponent {0} outside [0, 1]")]
    InvalidExponent(f64),

    #[error("tensor power dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("copy count must be positive and finite (got {0})")]
    InvalidCount(f64),

    #[error("separation angle {0} outside [0, pi]")]
    InvalidAngle(f64),

    #[error("degenerate pair: theta = 0 makes the hypotheses identical")]
    DegenerateAngle,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("basis {0} has zero shots")]
    ZeroShots(&'static str),

    #[error("empty grid")]
    EmptyGrid,

    #[error("curves are sampled on different grids")]
    GridMismatch,

    #[error("reference ({n}, {f}) lies outside the simulated grid")]
    ReferenceOutsideGrid { n: f64, f: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed grid table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;
