//! Hypergeometric function families and their parameters.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    F01,
    F11,
    F21,
    /// ₂F₀; only terminating cases can be evaluated directly.
    F20,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::F01 => "0F1",
            Family::F11 => "1F1",
            Family::F21 => "2F1",
            Family::F20 => "2F0",
        };
        f.write_str(s)
    }
}

/// A problem function `pFq(a, b; c; ±x)`.
///
/// Unused parameters are zero (`a`, `b` for ₀F₁, `b` for ₁F₁, `c` for ₂F₀).
/// When `negated` is set the function is evaluated at `-x`; the ₀F₁ DDEs
/// work with `₀F₁(;c;-x)` on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub family: Family,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub negated: bool,
}

impl FunctionSpec {
    pub fn f01(c: f64) -> Self {
        Self { family: Family::F01, a: 0.0, b: 0.0, c, negated: false }
    }

    /// `₀F₁(;c;-x)`.
    pub fn f01_negated(c: f64) -> Self {
        Self { negated: true, ..Self::f01(c) }
    }

    pub fn f11(a: f64, c: f64) -> Self {
        Self { family: Family::F11, a, b: 0.0, c, negated: false }
    }

    pub fn f21(a: f64, b: f64, c: f64) -> Self {
        Self { family: Family::F21, a, b, c, negated: false }
    }

    pub fn f20(a: f64, b: f64) -> Self {
        Self { family: Family::F20, a, b, c: 0.0, negated: false }
    }

    pub(crate) fn numerators(&self) -> Vec<f64> {
        match self.family {
            Family::F01 => vec![],
            Family::F11 => vec![self.a],
            Family::F21 | Family::F20 => vec![self.a, self.b],
        }
    }

    pub(crate) fn denominator(&self) -> Option<f64> {
        match self.family {
            Family::F20 => None,
            _ => Some(self.c),
        }
    }

    /// Degree of the polynomial when some numerator parameter is a
    /// non-positive integer (the smallest such degree).
    pub fn polynomial_degree(&self) -> Option<usize> {
        self.numerators()
            .iter()
            .filter_map(|&p| nonpositive_integer(p))
            .min()
    }

    /// Shift every parameter by the given integer offsets (family-appropriate).
    pub fn shifted(&self, da: f64, db: f64, dc: f64) -> Self {
        Self { a: self.a + da, b: self.b + db, c: self.c + dc, ..*self }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = if self.negated { "-x" } else { "x" };
        match self.family {
            Family::F01 => write!(f, "0F1(;{};{arg})", self.c),
            Family::F11 => write!(f, "1F1({};{};{arg})", self.a, self.c),
            Family::F21 => write!(f, "2F1({},{};{};{arg})", self.a, self.b, self.c),
            Family::F20 => write!(f, "2F0({},{};;{arg})", self.a, self.b),
        }
    }
}

/// `Some(n)` when `p == -n` for a non-negative integer `n`.
pub(crate) fn nonpositive_integer(p: f64) -> Option<usize> {
    if p <= 0.0 && p == p.round() && p > -1e15 {
        Some((-p) as usize)
    } else {
        None
    }
}
