//! Zeros of ₀F₁, ₁F₁, ₂F₁ and ₂F₀ on real intervals by fixed-point
//! iteration on first-order difference-differential systems.
//!
//! ```
//! use hyperzero::{find, FindOptions, FunctionSpec};
//!
//! // 0F1(;3/2;-x) = sin(2√x)/(2√x)
//! let report = find(&FunctionSpec::f01_negated(1.5), (0.0, 30.0), &FindOptions::default()).unwrap();
//! let pi2 = std::f64::consts::PI.powi(2);
//! assert!((report.records[1].x - pi2).abs() < 1e-12 * pi2);
//! ```

pub mod catalog;
pub mod error;
pub mod eval;
pub mod fpi;
mod jet;
pub mod oracle;
pub mod oscillation;
pub mod pipeline;
pub mod select;
pub mod spec;

pub use catalog::{make_dde, make_dde_unchecked, DdeDirection, DdeSystem, ZMap};
pub use error::{Error, Result};
pub use eval::{eval, eval_stable, eval_stable_with, eval_with, EvalConfig, EvalResult};
pub use fpi::{fixed_point, sweep, sweep_with, FpiConfig, StepPolicy, SweepMode, ZeroRecord};
pub use oracle::{brute_force_zeros, isolated_zero, GridSpace, OracleConfig};
pub use oscillation::{check_parameters, check_pointwise, OscillationReason, OscillationStatus, OscillationVerdict};
pub use pipeline::{find, FindOptions, PieceReport, RunReport};
pub use select::{normalize, select_dde, CanonicalMap, NormalizedProblem};
pub use spec::{Family, FunctionSpec};
