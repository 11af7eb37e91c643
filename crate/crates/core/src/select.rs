//! Reduction of a user problem to a canonical interval, and the choice of
//! DDE for each piece of that interval.

use serde::Serialize;

use crate::catalog::{make_dde, sample_points, DdeDirection, DdeSystem};
use crate::error::{Error, Result};
use crate::spec::{nonpositive_integer, Family, FunctionSpec};

/// Band around `c = 1` style degeneracies inside which a replacement
/// direction is used.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Change of variable from canonical `u` back to the user's `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CanonicalMap {
    Identity,
    /// `x = -u`
    Negate,
    /// `x = u/(u-1)`, for ₂F₁ on `x < 0`.
    Pfaff,
    /// `x = 1/(1-u)`, for ₂F₁ on `x > 1`.
    Reflect,
    /// `x = -1/u`, for ₂F₀ on `x < 0`.
    NegReciprocal,
    /// `x = 1/u`, for ₂F₀ on `x > 0`.
    Reciprocal,
}

impl CanonicalMap {
    pub fn pullback(&self, u: f64) -> f64 {
        match self {
            CanonicalMap::Identity => u,
            CanonicalMap::Negate => -u,
            CanonicalMap::Pfaff => u / (u - 1.0),
            CanonicalMap::Reflect => 1.0 / (1.0 - u),
            CanonicalMap::NegReciprocal => -1.0 / u,
            CanonicalMap::Reciprocal => 1.0 / u,
        }
    }

    /// Inverse of [`pullback`](Self::pullback), with limits at infinity.
    pub fn forward(&self, x: f64) -> f64 {
        match self {
            CanonicalMap::Identity => x,
            CanonicalMap::Negate => -x,
            CanonicalMap::Pfaff if x.is_infinite() => 1.0,
            CanonicalMap::Pfaff => x / (x - 1.0),
            CanonicalMap::Reflect if x.is_infinite() => 1.0,
            CanonicalMap::Reflect => 1.0 - 1.0 / x,
            CanonicalMap::NegReciprocal => -1.0 / x,
            CanonicalMap::Reciprocal => 1.0 / x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedProblem {
    pub original: FunctionSpec,
    pub user_interval: (f64, f64),
    pub spec: FunctionSpec,
    pub canonical_interval: (f64, f64),
    pub map: CanonicalMap,
    /// The user function is the canonical one times a factor without zeros
    /// on the interval, so zero sets correspond exactly.
    pub preserves_zeros: bool,
}

impl NormalizedProblem {
    pub fn pullback(&self, u: f64) -> f64 {
        self.map.pullback(u)
    }

    pub fn forward(&self, x: f64) -> f64 {
        self.map.forward(x)
    }
}

fn ordered(p: f64, q: f64) -> (f64, f64) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Maps the problem onto `(0,∞)` (₀F₁ with negative argument, ₁F₁) or
/// `(0,1)` (₂F₁).
pub fn normalize(spec: &FunctionSpec, interval: (f64, f64)) -> Result<NormalizedProblem> {
    let (lo, hi) = interval;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidInput(format!("empty interval ({lo}, {hi})")));
    }
    let straddles = |p: f64| lo < p && p < hi;
    let singular = match spec.family {
        Family::F21 => straddles(0.0) || straddles(1.0),
        _ => straddles(0.0),
    };
    if singular {
        return Err(Error::SingularInterval { lo, hi });
    }
    let build = |target: FunctionSpec, map: CanonicalMap| {
        // signed zeros keep reciprocal maps on the right side of the pole
        let (l, h) = (if lo == 0.0 { 0.0 } else { lo }, if hi == 0.0 { -0.0 } else { hi });
        let canonical_interval = ordered(map.forward(l), map.forward(h));
        Ok(NormalizedProblem {
            original: *spec,
            user_interval: interval,
            spec: target,
            canonical_interval,
            map,
            preserves_zeros: true,
        })
    };
    let (a, b, c) = (spec.a, spec.b, spec.c);
    match spec.family {
        Family::F01 => {
            // canonical form has a negative raw argument when oscillatory
            let negative_side = hi <= 0.0;
            match (spec.negated, negative_side) {
                (true, false) => build(*spec, CanonicalMap::Identity),
                (false, true) => build(FunctionSpec::f01_negated(c), CanonicalMap::Negate),
                (false, false) => build(*spec, CanonicalMap::Identity),
                (true, true) => build(FunctionSpec::f01(c), CanonicalMap::Negate),
            }
        }
        _ if spec.negated => {
            let flipped = FunctionSpec { negated: false, ..*spec };
            let inner = normalize(&flipped, (-hi, -lo))?;
            let map = compose_negation(inner.map).ok_or_else(|| {
                Error::UnsupportedSolutionBranch(format!("negated argument for {spec} on this interval"))
            })?;
            build(inner.spec, map)
        }
        Family::F11 if hi <= 0.0 => build(FunctionSpec::f11(c - a, c), CanonicalMap::Negate),
        Family::F11 => build(*spec, CanonicalMap::Identity),
        Family::F21 if hi <= 0.0 => build(FunctionSpec::f21(a, c - b, c), CanonicalMap::Pfaff),
        Family::F21 if lo >= 1.0 => {
            let (a, b) = polynomial_first(a, b).ok_or_else(|| {
                Error::UnsupportedSolutionBranch(format!("{spec} on x > 1 is not a terminating series"))
            })?;
            build(FunctionSpec::f21(a, a + 1.0 - c, a + b + 1.0 - c), CanonicalMap::Reflect)
        }
        Family::F21 => build(*spec, CanonicalMap::Identity),
        Family::F20 => {
            let (a, b) = polynomial_first(a, b).ok_or_else(|| {
                Error::UnsupportedSolutionBranch(format!("{spec} does not terminate"))
            })?;
            let beta = 1.0 + a - b;
            if hi <= 0.0 {
                build(FunctionSpec::f11(a, beta), CanonicalMap::NegReciprocal)
            } else {
                // Kummer's transformation on the negative confluent argument
                build(FunctionSpec::f11(beta - a, beta), CanonicalMap::Reciprocal)
            }
        }
    }
}

/// Reorders `(a, b)` so that `a` is the non-positive integer giving the
/// lower degree.
fn polynomial_first(a: f64, b: f64) -> Option<(f64, f64)> {
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(na), Some(nb)) if nb < na => Some((b, a)),
        (Some(_), _) => Some((a, b)),
        (None, Some(_)) => Some((b, a)),
        (None, None) => None,
    }
}

fn compose_negation(inner: CanonicalMap) -> Option<CanonicalMap> {
    match inner {
        CanonicalMap::Identity => Some(CanonicalMap::Negate),
        CanonicalMap::Negate => Some(CanonicalMap::Identity),
        CanonicalMap::NegReciprocal => Some(CanonicalMap::Reciprocal),
        CanonicalMap::Reciprocal => Some(CanonicalMap::NegReciprocal),
        _ => None,
    }
}

/// A stretch of the canonical interval together with the DDE chosen for it.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecePlan {
    pub interval: (f64, f64),
    pub dde: DdeSystem,
    /// Other admissible systems, best first.
    pub fallbacks: Vec<DdeSystem>,
}

/// Supremum of `D` over the finite part of `interval`.
pub fn sup_d(dde: &DdeSystem, interval: (f64, f64)) -> f64 {
    let lo = interval.0.max(dde.domain.0);
    let hi = interval.1.min(dde.domain.1).min(1e6);
    sample_points(lo, hi, 64).into_iter().map(|x| dde.d_metric(x)).fold(0.0, f64::max)
}

/// Preferred direction per piece of the canonical interval.
fn regime_pieces(problem: &NormalizedProblem) -> Result<Vec<((f64, f64), DdeDirection)>> {
    let spec = &problem.spec;
    let (lo, hi) = problem.canonical_interval;
    let split = |at: f64, below: DdeDirection, above: DdeDirection| {
        if at <= lo {
            vec![((lo, hi), above)]
        } else if at >= hi {
            vec![((lo, hi), below)]
        } else {
            vec![((lo, at), below), ((at, hi), above)]
        }
    };
    match spec.family {
        Family::F01 if spec.negated => {
            let nu = spec.c - 1.0;
            let m1 = DdeDirection::F01 { m: 1 };
            let m2 = DdeDirection::F01 { m: 2 };
            if nu > 100.0 {
                Ok(split((nu * nu - 1.0) / 2.0, m2, m1))
            } else {
                Ok(vec![((lo, hi), m1)])
            }
        }
        Family::F11 => {
            let low = if (spec.c - 1.0).abs() < DEGENERACY_TOL {
                DdeDirection::F11 { k: 0, m: -1 }
            } else {
                DdeDirection::F11 { k: 1, m: 1 }
            };
            Ok(split(spec.c - spec.a, low, DdeDirection::F11 { k: 1, m: 0 }))
        }
        Family::F21 => {
            let near_one = |v: f64| (v - 1.0).abs() < DEGENERACY_TOL;
            let dir = if near_one(spec.c) || near_one(spec.a) || near_one(spec.b) {
                DdeDirection::F21 { k: 0, l: 0, m: -1 }
            } else {
                DdeDirection::F21 { k: 1, l: 1, m: 1 }
            };
            Ok(vec![((lo, hi), dir)])
        }
        _ => Err(Error::NoAdmissibleDde),
    }
}

/// Picks a DDE for every piece of the canonical interval. A preferred
/// direction that cannot be built is replaced by the best fallback.
pub fn select_dde(problem: &NormalizedProblem) -> Result<Vec<PiecePlan>> {
    let mut out = vec![];
    for (interval, preferred) in regime_pieces(problem)? {
        let mut candidates: Vec<(f64, DdeSystem)> = DdeDirection::for_family(problem.spec.family)
            .into_iter()
            .filter(|&d| d != preferred)
            .filter_map(|d| make_dde(&problem.spec, d).ok())
            .map(|s| (sup_d(&s, interval), s))
            .collect();
        candidates.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut fallbacks: Vec<DdeSystem> = candidates.into_iter().map(|(_, s)| s).collect();
        let dde = match make_dde(&problem.spec, preferred) {
            Ok(d) => d,
            Err(_) if !fallbacks.is_empty() => fallbacks.remove(0),
            Err(_) => return Err(Error::NoAdmissibleDde),
        };
        out.push(PiecePlan { interval, dde, fallbacks });
    }
    Ok(out)
}

/// Single-piece plan with a user-chosen direction and no fallbacks.
pub fn select_override(problem: &NormalizedProblem, direction: DdeDirection) -> Result<Vec<PiecePlan>> {
    let dde = make_dde(&problem.spec, direction)?;
    Ok(vec![PiecePlan { interval: problem.canonical_interval, dde, fallbacks: vec![] }])
}
