use thiserror::Error;

use crate::expr::{DomainError, ExprError};

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("axis {axis} out of range for a grid with {dims} time axes")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("field has {got} components, expected {expected}")]
    ComponentMismatch { expected: usize, got: usize },

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("right-hand side has nonzero mean {mean:e} in component {component}")]
    NonZeroMean { component: usize, mean: f64 },

    #[error("potential declares no periods")]
    MissingPeriods,

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("potential evaluation failed at node {node:?} (t = {t:?}): {source}")]
    PotentialDomain {
        node: Vec<usize>,
        t: Vec<f64>,
        #[source]
        source: DomainError,
    },

    #[error("lattice shift changed the action by {drift:e} (relative)")]
    GaugeViolation { drift: f64 },

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
