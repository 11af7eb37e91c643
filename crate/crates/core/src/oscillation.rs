//! Whether solutions can have two or more zeros on an interval.

use std::fmt;

use serde::Serialize;

use crate::catalog::{sample_points, DdeSystem};
use crate::spec::{Family, FunctionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OscillationStatus {
    Oscillatory,
    AtMostOneZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OscillationReason {
    /// `d_n e_n >= 0` throughout.
    DEnonneg,
    /// `|η| >= 1` throughout.
    EtaGeqOne,
    /// `Ã < 0` throughout.
    AtildeNegative,
    /// A parameter condition set failed.
    ParamCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationVerdict {
    pub status: OscillationStatus,
    pub reason: Option<OscillationReason>,
    /// Condition name such as `C3`, or a short description.
    pub condition: Option<String>,
}

impl OscillationVerdict {
    fn oscillatory(condition: Option<&str>) -> Self {
        Self { status: OscillationStatus::Oscillatory, reason: None, condition: condition.map(Into::into) }
    }

    fn at_most_one(reason: OscillationReason, condition: &str) -> Self {
        Self { status: OscillationStatus::AtMostOneZero, reason: Some(reason), condition: Some(condition.into()) }
    }

    pub fn is_oscillatory(&self) -> bool {
        self.status == OscillationStatus::Oscillatory
    }
}

impl fmt::Display for OscillationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.status)?;
        if let Some(c) = &self.condition {
            write!(f, " ({c})")?;
        }
        Ok(())
    }
}

/// Sign checks of `d_n e_n`, `|η|` and `Ã` on a 256-point grid over
/// `interval`. Any point that defeats a condition keeps the interval
/// oscillatory.
pub fn check_pointwise(dde: &DdeSystem, interval: (f64, f64)) -> OscillationVerdict {
    let lo = interval.0.max(dde.domain.0);
    let hi = interval.1.min(dde.domain.1);
    let grid = sample_points(lo, hi, 256);
    if grid.iter().all(|&x| dde.de_product(x) >= 0.0) {
        return OscillationVerdict::at_most_one(OscillationReason::DEnonneg, "d·e >= 0");
    }
    if grid.iter().all(|&x| dde.eta(x).abs() >= 1.0) {
        return OscillationVerdict::at_most_one(OscillationReason::EtaGeqOne, "|eta| >= 1");
    }
    if grid.iter().all(|&x| dde.atilde(x) < 0.0) {
        return OscillationVerdict::at_most_one(OscillationReason::AtildeNegative, "A~ < 0");
    }
    OscillationVerdict::oscillatory(None)
}

/// Parameter conditions for the canonical interval containing `interval`:
/// `(0,∞)` or `(-∞,0)` for ₁F₁, and `(-∞,0)`, `(0,1)`, `(1,∞)` for ₂F₁.
/// ₀F₁ oscillates only for a negative raw argument.
pub fn check_parameters(spec: &FunctionSpec, interval: (f64, f64)) -> OscillationVerdict {
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let mid_sign = if interval.1 <= 0.0 { -1.0 } else { 1.0 };
    let fail = |name: &str| OscillationVerdict::at_most_one(OscillationReason::ParamCondition, name);
    match spec.family {
        Family::F01 => {
            let raw_negative = (mid_sign < 0.0) != spec.negated;
            if raw_negative {
                OscillationVerdict::oscillatory(Some("negative argument"))
            } else {
                fail("positive argument")
            }
        }
        Family::F11 => {
            if mid_sign > 0.0 {
                if c - a > 1.0 && a < 0.0 {
                    OscillationVerdict::oscillatory(Some("c-a>1, a<0"))
                } else {
                    fail("c-a>1, a<0")
                }
            } else if c - a < 0.0 && a > 1.0 {
                OscillationVerdict::oscillatory(Some("c-a<0, a>1"))
            } else {
                fail("c-a<0, a>1")
            }
        }
        Family::F21 => {
            let (first, second) = if interval.1 <= 0.0 {
                ("C1", "C2")
            } else if interval.0 >= 1.0 {
                ("C5", "C6")
            } else {
                ("C3", "C4")
            };
            for name in [first, second] {
                if gauss_condition(name, a, b, c) {
                    return OscillationVerdict::oscillatory(Some(name));
                }
            }
            fail(&format!("{first}/{second}"))
        }
        Family::F20 => fail("2F0 handled through its confluent map"),
    }
}

/// One of the six Gauss condition sets, by name.
pub fn gauss_condition(name: &str, a: f64, b: f64, c: f64) -> bool {
    let (ca, cb) = (c - a, c - b);
    match name {
        "C1" => a < 0.0 && b < 0.0 && ca > 1.0 && cb > 1.0,
        "C2" => a > 1.0 && b > 1.0 && ca < 0.0 && cb < 0.0,
        "C3" => a < 0.0 && b > 1.0 && ca > 1.0 && cb < 0.0,
        "C4" => a > 1.0 && b < 0.0 && ca < 0.0 && cb > 1.0,
        "C5" => a < 0.0 && b < 0.0 && ca < 0.0 && cb < 0.0,
        "C6" => a > 1.0 && b > 1.0 && ca > 1.0 && cb > 1.0,
        _ => false,
    }
}
