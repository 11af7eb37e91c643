use thiserror::Error;

use crate::fpi::ZeroRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("series pole: denominator parameter {param} is a non-positive integer")]
    PoleAtParameter { param: f64 },

    #[error("argument {x} outside the convergence domain of the series")]
    OutsideDomain { x: f64 },

    #[error("backward recurrence normalization lost precision (cancellation {cancellation:e})")]
    RecurrenceUnstable { cancellation: f64 },

    #[error("direction {direction} is degenerate for these parameters: {why}")]
    DegenerateDirection { direction: String, why: String },

    #[error("d_n e_n >= 0 on the domain of {direction}: no oscillatory solutions")]
    NotOscillatoryHere { direction: String },

    #[error("fixed point iteration did not converge after {iterations} iterations (last z = {last_z})")]
    NoConvergence {
        iterations: usize,
        last_z: f64,
        partial: Vec<ZeroRecord>,
    },

    #[error("iterate left the domain of the change of variable (z = {z})")]
    DomainExit { z: f64 },

    #[error("interval ({lo}, {hi}) contains a singular point of the differential equation")]
    SingularInterval { lo: f64, hi: f64 },

    #[error("unsupported solution branch: {0}")]
    UnsupportedSolutionBranch(String),

    #[error("no admissible DDE for these parameters")]
    NoAdmissibleDde,

    #[error("oracle grid too coarse near x = {x}")]
    GridTooCoarse { x: f64 },

    #[error("found {count} zeros where at most one was expected")]
    MultipleZerosFound { count: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
