//! First-order difference-differential systems
//!
//! ```text
//! y_n'     = a_n y_n     + d_n y_{n-1}
//! y_{n-1}' = b_n y_{n-1} + e_n y_n
//! ```
//!
//! linking a hypergeometric function `y_n` to a contiguous contrast function
//! `y_{n-1}`, one per cataloged shift direction. Each system carries its
//! change of variable `z = ∫ √(-d_n e_n) dx` (always increasing in `x`) and
//! the derived `η`, `Ã` that drive the fixed-point sweep.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{eval_stable, EvalResult};
use crate::jet::Jet;
use crate::spec::{nonpositive_integer, Family, FunctionSpec};

/// Shift from the problem function to its contrast: the contrast of
/// `F(a, b; c)` in direction `(k, l, m)` is `F(a-k, b-l; c-m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DdeDirection {
    F01 { m: i8 },
    F11 { k: i8, m: i8 },
    F21 { k: i8, l: i8, m: i8 },
}

impl DdeDirection {
    pub const CATALOG: [DdeDirection; 12] = [
        DdeDirection::F01 { m: 1 },
        DdeDirection::F01 { m: 2 },
        DdeDirection::F11 { k: 1, m: 0 },
        DdeDirection::F11 { k: 0, m: -1 },
        DdeDirection::F11 { k: 1, m: 1 },
        DdeDirection::F21 { k: 1, l: 0, m: 0 },
        DdeDirection::F21 { k: 1, l: 1, m: 0 },
        DdeDirection::F21 { k: 1, l: 1, m: 2 },
        DdeDirection::F21 { k: 1, l: 0, m: 1 },
        DdeDirection::F21 { k: 1, l: -1, m: 0 },
        DdeDirection::F21 { k: 0, l: 0, m: -1 },
        DdeDirection::F21 { k: 1, l: 1, m: 1 },
    ];

    pub fn family(&self) -> Family {
        match self {
            DdeDirection::F01 { .. } => Family::F01,
            DdeDirection::F11 { .. } => Family::F11,
            DdeDirection::F21 { .. } => Family::F21,
        }
    }

    pub fn for_family(family: Family) -> Vec<DdeDirection> {
        Self::CATALOG.into_iter().filter(|d| d.family() == family).collect()
    }

    pub fn shift(&self) -> Vec<i8> {
        match *self {
            DdeDirection::F01 { m } => vec![m],
            DdeDirection::F11 { k, m } => vec![k, m],
            DdeDirection::F21 { k, l, m } => vec![k, l, m],
        }
    }

    /// Parses a comma separated shift such as `1,-1,0`; the result must be
    /// cataloged for `family`.
    pub fn parse(family: Family, text: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<i8>, _> =
            text.split(',').map(|s| s.trim().parse::<i8>()).collect();
        let parts = parts.map_err(|_| Error::InvalidInput(format!("bad DDE shift '{text}'")))?;
        let dir = match (family, parts.as_slice()) {
            (Family::F01, &[m]) => DdeDirection::F01 { m },
            (Family::F11, &[k, m]) => DdeDirection::F11 { k, m },
            (Family::F21, &[k, l, m]) => DdeDirection::F21 { k, l, m },
            _ => return Err(Error::InvalidInput(format!("shift '{text}' does not fit {family}"))),
        };
        if Self::CATALOG.contains(&dir) {
            Ok(dir)
        } else {
            Err(Error::InvalidInput(format!("DDE ({text}) is not cataloged for {family}")))
        }
    }
}

impl fmt::Display for DdeDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.shift().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Closed-form change of variable `z(x) = k·g(x)` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZMap {
    /// `k √x`
    Sqrt(f64),
    /// `k x`
    Linear(f64),
    /// `k ln x`
    Log(f64),
    /// `-k ln(1-x)`
    Log1m(f64),
    /// `k atanh √x`
    AtanhSqrt(f64),
    /// `-k atanh √(1-x)`
    AtanhSqrtOneMinus(f64),
    /// `k ln(x/(1-x))`
    Logit(f64),
    /// `k asin(2x-1)`
    Arcsin(f64),
}

impl ZMap {
    pub fn z(&self, x: f64) -> f64 {
        match *self {
            ZMap::Sqrt(k) => k * x.sqrt(),
            ZMap::Linear(k) => k * x,
            ZMap::Log(k) => k * x.ln(),
            ZMap::Log1m(k) => -k * (-x).ln_1p(),
            ZMap::AtanhSqrt(k) => {
                let r = x.sqrt();
                k * ((1.0 + r) / (1.0 - x).sqrt()).ln()
            }
            ZMap::AtanhSqrtOneMinus(k) => {
                let s = (1.0 - x).sqrt();
                -k * ((1.0 + s) / x.sqrt()).ln()
            }
            ZMap::Logit(k) => k * (x.ln() - (-x).ln_1p()),
            ZMap::Arcsin(k) => {
                let t = if x < 0.5 {
                    2.0 * x.sqrt().asin() - FRAC_PI_2
                } else {
                    FRAC_PI_2 - 2.0 * (1.0 - x).sqrt().asin()
                };
                k * t
            }
        }
    }

    pub fn x(&self, z: f64) -> f64 {
        match *self {
            ZMap::Sqrt(k) => (z / k).powi(2),
            ZMap::Linear(k) => z / k,
            ZMap::Log(k) => (z / k).exp(),
            ZMap::Log1m(k) => -(-z / k).exp_m1(),
            ZMap::AtanhSqrt(k) => (z / k).tanh().powi(2),
            ZMap::AtanhSqrtOneMinus(k) => (z / k).cosh().powi(-2),
            ZMap::Logit(k) => 1.0 / (1.0 + (-z / k).exp()),
            ZMap::Arcsin(k) => (z / (2.0 * k) + FRAC_PI_2 / 2.0).sin().powi(2),
        }
    }
}

/// A cataloged system bound to concrete parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DdeSystem {
    pub direction: DdeDirection,
    /// The problem function `y_n`.
    pub spec: FunctionSpec,
    /// The contrast function `y_{n-1}`.
    pub contrast: FunctionSpec,
    pub domain: (f64, f64),
    pub zmap: ZMap,
}

/// Builds the system and checks it is usable: no degenerate parameter
/// combination and `d_n e_n < 0` across the natural domain.
pub fn make_dde(spec: &FunctionSpec, direction: DdeDirection) -> Result<DdeSystem> {
    let dde = make_dde_unchecked(spec, direction)?;
    let (lo, hi) = dde.domain;
    if sample_points(lo, hi, 256).into_iter().any(|x| !(dde.de_product(x) < 0.0)) {
        return Err(Error::NotOscillatoryHere { direction: direction.to_string() });
    }
    Ok(dde)
}

/// Like [`make_dde`] but without the `d_n e_n < 0` requirement, so that
/// non-oscillatory regimes can still be inspected.
pub fn make_dde_unchecked(spec: &FunctionSpec, direction: DdeDirection) -> Result<DdeSystem> {
    let family = direction.family();
    if spec.family != family {
        return Err(Error::InvalidInput(format!("DDE {direction} belongs to {family}, not {}", spec.family)));
    }
    if family == Family::F01 && !spec.negated {
        return Err(Error::NotOscillatoryHere { direction: direction.to_string() });
    }
    if let Some(c) = spec.denominator() {
        if let Some(p) = nonpositive_integer(c) {
            if spec.polynomial_degree().is_none_or(|m| m > p) {
                return Err(Error::PoleAtParameter { param: c });
            }
        }
    }
    let degenerate = |why: &str| Error::DegenerateDirection { direction: direction.to_string(), why: why.into() };
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let shift = direction.shift();
    let contrast = match direction {
        DdeDirection::F01 { m } => spec.shifted(0.0, 0.0, -f64::from(m)),
        DdeDirection::F11 { k, m } => spec.shifted(-f64::from(k), 0.0, -f64::from(m)),
        DdeDirection::F21 { k, l, m } => spec.shifted(-f64::from(k), -f64::from(l), -f64::from(m)),
    };
    let cond = match shift.as_slice() {
        [1] => (c == 1.0).then_some("c = 1"),
        [2] => (c == 1.0 || c == 2.0).then_some("c = 1 or c = 2"),
        [1, 1] | [1, 1, 1] | [1, 0, 1] => (c == 1.0).then_some("c = 1"),
        [0, -1] | [0, 0, -1] => (c == 0.0).then_some("c = 0"),
        [1, 1, 2] => (c == 1.0 || c == 2.0).then_some("c = 1 or c = 2"),
        [1, 1, 0] => (a + b - c - 1.0 == 0.0).then_some("a + b - c - 1 = 0"),
        [1, -1, 0] => (b - a + 1.0 == 0.0).then_some("b - a + 1 = 0"),
        _ => None,
    };
    if let Some(why) = cond {
        return Err(degenerate(why));
    }
    if let Some(cc) = contrast.denominator() {
        if let Some(p) = nonpositive_integer(cc) {
            if contrast.polynomial_degree().is_none_or(|m| m > p) {
                return Err(degenerate("contrast function has a series pole"));
            }
        }
    }
    let sq = |v: f64| v.sqrt();
    let (domain, zmap) = match direction {
        DdeDirection::F01 { m: 1 } => ((0.0, f64::INFINITY), ZMap::Sqrt(2.0)),
        DdeDirection::F01 { .. } => ((0.0, f64::INFINITY), ZMap::Linear(1.0 / (c - 2.0).abs())),
        DdeDirection::F11 { k: 1, m: 0 } => ((0.0, f64::INFINITY), ZMap::Log(sq((c - a) * (1.0 - a)))),
        DdeDirection::F11 { k: 0, .. } => ((0.0, f64::INFINITY), ZMap::Sqrt(2.0 * sq(c - a))),
        DdeDirection::F11 { .. } => ((0.0, f64::INFINITY), ZMap::Sqrt(2.0 * sq(1.0 - a))),
        DdeDirection::F21 { k, l, m } => {
            let zmap = match (k, l, m) {
                (1, 0, 0) => ZMap::AtanhSqrtOneMinus(2.0 * sq((c - a) * (1.0 - a))),
                (1, 1, 0) => ZMap::Log(
                    sq((b - c) * (c - a) * (b - 1.0) * (1.0 - a)) / (a + b - c - 1.0).abs(),
                ),
                (1, 1, 2) => ZMap::Log1m(
                    sq((c - a - 1.0) * (1.0 - a) * (1.0 + b - c) * (b - 1.0)) / (c - 2.0).abs(),
                ),
                (1, 0, 1) => ZMap::AtanhSqrt(2.0 * sq((1.0 - a) * (b + 1.0 - c))),
                (1, -1, 0) => ZMap::Logit(
                    sq(b * (c - a) * (1.0 - a) * (1.0 + b - c)) / (b - a + 1.0).abs(),
                ),
                (0, 0, -1) => ZMap::Arcsin(sq((b - c) * (c - a))),
                _ => ZMap::Arcsin(sq((b - 1.0) * (1.0 - a))),
            };
            ((0.0, 1.0), zmap)
        }
    };
    Ok(DdeSystem { direction, spec: *spec, contrast, domain, zmap })
}

impl DdeSystem {
    /// `[a_n, b_n, d_n, e_n]` as Taylor jets at `t`.
    fn coefficient_jets(&self, t: Jet) -> [Jet; 4] {
        let FunctionSpec { a, b, c, .. } = self.spec;
        let k = Jet::constant;
        match self.direction {
            DdeDirection::F01 { m: 1 } => {
                let nu = c - 1.0;
                [-nu / t, k(0.0), nu / t, k(-1.0 / nu)]
            }
            DdeDirection::F01 { .. } => {
                let c2 = c - 2.0;
                [
                    -(c2 * c2 + c2 - t) / (c2 * t),
                    k(-1.0 / c2),
                    (c - 1.0) / t,
                    -t / ((c - 1.0) * c2 * c2),
                ]
            }
            DdeDirection::F11 { k: 1, m: 0 } => {
                [(a - c + t) / t, -(a - 1.0) / t, -(a - c) / t, (a - 1.0) / t]
            }
            DdeDirection::F11 { k: 0, .. } => [k(1.0), -c / t, k((a - c) / c), c / t],
            DdeDirection::F11 { .. } => {
                [(t + 1.0 - c) / t, k(0.0), (c - 1.0) / t, k((a - 1.0) / (c - 1.0))]
            }
            DdeDirection::F21 { k: kk, l, m } => {
                let u = 1.0 - t;
                match (kk, l, m) {
                    (1, 0, 0) => [
                        (c - a - b * t) / (t * (t - 1.0)),
                        (1.0 - a) / t,
                        (a - c) / (t * (t - 1.0)),
                        (a - 1.0) / t,
                    ],
                    (1, 1, 0) => {
                        let s = a + b - c - 1.0;
                        [
                            (a * b - c - (a + b) * s) / (t * s) + (a + b - c) / (t * u),
                            (a + b - a * b - 1.0) / (s * t),
                            (a - c) * (c - b) / (t * u * s),
                            -u * ((a - 1.0) * (1.0 - b) / s) / t,
                        ]
                    }
                    (1, 1, 2) => [
                        (u * ((1.0 - a - b) * (c - 1.0) + a * b) + ((c - 1.0) * (1.0 + a + b - c) - a * b))
                            / (t * u * (c - 2.0)),
                        (1.0 - a - b + a * b) / (u * (c - 2.0)),
                        (c - 1.0) / (t * u),
                        -t * ((a - c + 1.0) * (1.0 - a) * (c - b - 1.0) * (b - 1.0) / ((c - 1.0) * (c - 2.0) * (c - 2.0)))
                            / u,
                    ],
                    (1, 0, 1) => [
                        (1.0 - c + b * t) / (t * u),
                        -(1.0 - a) / u,
                        (c - 1.0) / (t * u),
                        ((1.0 - a) * (b + 1.0 - c) / (1.0 - c)) / u,
                    ],
                    (1, -1, 0) => {
                        let q = b - a + 1.0;
                        [
                            b * (t * q + (a - c)) / (t * u * q),
                            (1.0 - a) * (u * q + (a - c)) / (t * u * q),
                            (b * (c - a) / q) / (t * u),
                            (-(1.0 - a) * (1.0 + b - c) / q) / (t * u),
                        ]
                    }
                    (0, 0, -1) => [
                        (a + b - c) / u,
                        -c / t,
                        (-(b - c) * (c - a) / c) / u,
                        c / t,
                    ],
                    _ => [
                        (t * (a + b - 1.0) + (1.0 - c)) / (t * u),
                        k(0.0),
                        (c - 1.0) / (t * u),
                        k((b - 1.0) * (1.0 - a) / (1.0 - c)),
                    ],
                }
            }
        }
    }

    /// `[a_n, b_n, d_n, e_n]` at `x`.
    pub fn coefficients(&self, x: f64) -> [f64; 4] {
        self.coefficient_jets(Jet::constant(x)).map(|j| j.value())
    }

    pub fn de_product(&self, x: f64) -> f64 {
        let [_, _, d, e] = self.coefficients(x);
        d * e
    }

    /// `D(x) = |d_n e_n|`, the selection metric.
    pub fn d_metric(&self, x: f64) -> f64 {
        self.de_product(x).abs()
    }

    pub fn z_of_x(&self, x: f64) -> f64 {
        self.zmap.z(x)
    }

    pub fn x_of_z(&self, z: f64) -> f64 {
        self.zmap.x(z)
    }

    /// Image of the natural domain under `z_of_x`.
    pub fn z_range(&self) -> (f64, f64) {
        (self.z_of_x(self.domain.0), self.z_of_x(self.domain.1))
    }

    /// Closed form for `F01 m=1`, where `η = (ν-½)/(2√x)` and
    /// `Ã = 1 - (ν²-¼)/(4x)`; returns `(η, Ã, dÃ/dz)`.
    fn bessel_closed_form(&self, x: f64) -> Option<(f64, f64, f64)> {
        if self.direction != (DdeDirection::F01 { m: 1 }) {
            return None;
        }
        let nu = self.spec.c - 1.0;
        let w = (nu * nu - 0.25) / 4.0;
        Some(((nu - 0.5) / (2.0 * x.sqrt()), 1.0 - w / x, w / (x * x.sqrt())))
    }

    /// `(η, √(-de))` as jets; η is exact through second order.
    fn eta_jets(&self, x: f64) -> (Jet, Jet) {
        let [a, b, d, e] = self.coefficient_jets(Jet::var(x));
        let r = a - b + 0.5 * (e.deriv() / e - d.deriv() / d);
        let sq = (-(d * e)).sqrt();
        (-r / (2.0 * sq), sq)
    }

    pub fn eta(&self, x: f64) -> f64 {
        if let Some((eta, _, _)) = self.bessel_closed_form(x) {
            return eta;
        }
        self.eta_jets(x).0.value()
    }

    /// Coefficient of the normal form `ÿ + Ã y = 0` in `z`.
    pub fn atilde(&self, x: f64) -> f64 {
        if let Some((_, at, _)) = self.bessel_closed_form(x) {
            return at;
        }
        self.atilde_jet(x).value()
    }

    /// `dÃ/dz`.
    pub fn atilde_dz(&self, x: f64) -> f64 {
        if let Some((_, _, d)) = self.bessel_closed_form(x) {
            return d;
        }
        let (eta, sq) = self.eta_jets(x);
        let at = 1.0 + eta.deriv() / sq - eta * eta;
        at.nth(1) / sq.value()
    }

    fn atilde_jet(&self, x: f64) -> Jet {
        let (eta, sq) = self.eta_jets(x);
        1.0 + eta.deriv() / sq - eta * eta
    }

    /// Where η changes sign, when the catalog knows it in closed form.
    pub fn eta_root(&self) -> Option<f64> {
        match self.direction {
            DdeDirection::F01 { m: 2 } => {
                let nu = self.spec.c - 1.0;
                (nu > 1.0).then(|| (nu - 1.0).powi(2) / 2.0)
            }
            _ => None,
        }
    }

    /// Problem and contrast functions at `x`.
    pub fn eval_pair(&self, x: f64) -> Result<(EvalResult, EvalResult)> {
        Ok((eval_stable(&self.spec, x)?, eval_stable(&self.contrast, x)?))
    }
}

/// Free-function form of [`DdeSystem::eta`].
pub fn eta_at(dde: &DdeSystem, x: f64) -> f64 {
    dde.eta(x)
}

/// Largest normalized residual of the two DDE identities over `samples`,
/// using independently evaluated values and derivatives.
pub fn verify_dde_consistency(dde: &DdeSystem, samples: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in samples {
        let (yn, ym) = dde.eval_pair(x)?;
        let [a, b, d, e] = dde.coefficients(x);
        let rel = |terms: [f64; 3]| {
            let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
            let r = (terms[0] - terms[1] - terms[2]).abs();
            if scale > 0.0 {
                r / scale
            } else {
                0.0
            }
        };
        worst = worst.max(rel([yn.derivative, a * yn.value, d * ym.value]));
        worst = worst.max(rel([ym.derivative, b * ym.value, e * yn.value]));
    }
    Ok(worst)
}

/// `n` interior sample points clustered toward the ends of `(lo, hi)`;
/// logarithmic spacing on unbounded ends.
pub(crate) fn sample_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let u = |i: usize| (i as f64 + 0.5) / n as f64;
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (0..n)
            .map(|i| lo + (hi - lo) * (1.0 - (std::f64::consts::PI * u(i)).cos()) / 2.0)
            .collect(),
        (true, false) => {
            let w = lo.abs().max(1.0);
            (0..n).map(|i| lo + w * 10f64.powf(-8.0 + 16.0 * u(i))).collect()
        }
        (false, true) => {
            let w = hi.abs().max(1.0);
            (0..n).map(|i| hi - w * 10f64.powf(8.0 - 16.0 * u(i))).collect()
        }
        (false, false) => (0..n)
            .map(|i| {
                let v = 16.0 * u(i) - 8.0;
                v.signum() * (10f64.powf(v.abs()) - 1.0)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_systems() -> Vec<DdeSystem> {
        let f11 = FunctionSpec::f11(-7.3, 2.6);
        let f21 = FunctionSpec::f21(-3.3, 4.7, 2.6);
        let mut out = vec![
            make_dde_unchecked(&FunctionSpec::f01_negated(2.5), DdeDirection::F01 { m: 1 }).unwrap(),
            make_dde_unchecked(&FunctionSpec::f01_negated(7.5), DdeDirection::F01 { m: 2 }).unwrap(),
        ];
        for d in DdeDirection::for_family(Family::F11) {
            out.push(make_dde_unchecked(&f11, d).unwrap());
        }
        for d in DdeDirection::for_family(Family::F21) {
            out.push(make_dde_unchecked(&f21, d).unwrap());
        }
        out
    }

    #[test]
    fn catalog_examples() {
        let d = make_dde(&FunctionSpec::f01_negated(1.5), DdeDirection::F01 { m: 1 }).unwrap();
        assert!((d.z_of_x(4.0) - 4.0).abs() < 1e-15);
        assert!((d.d_metric(3.0) - 1.0 / 3.0).abs() < 1e-15);

        let d = make_dde(&FunctionSpec::f01_negated(201.0), DdeDirection::F01 { m: 2 }).unwrap();
        assert!((d.z_of_x(398.0) - 2.0).abs() < 1e-14);
        for x in [1.0, 100.0, 1e4] {
            assert!((d.d_metric(x) - 1.0 / 199f64.powi(2)).abs() < 1e-18);
        }

        let d = make_dde(&FunctionSpec::f11(-2.0, 1.5), DdeDirection::F11 { k: 1, m: 1 }).unwrap();
        assert!((d.z_of_x(3.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn eta_examples() {
        let d = make_dde(&FunctionSpec::f01_negated(1.5), DdeDirection::F01 { m: 1 }).unwrap();
        for x in [0.1, 1.0, 50.0] {
            assert_eq!(eta_at(&d, x), 0.0);
            assert_eq!(d.atilde(x), 1.0);
        }
        let d = make_dde(&FunctionSpec::f01_negated(2.5), DdeDirection::F01 { m: 1 }).unwrap();
        assert!((eta_at(&d, 1.0) - 0.5).abs() < 1e-15);

        let d = make_dde(&FunctionSpec::f01_negated(201.0), DdeDirection::F01 { m: 2 }).unwrap();
        assert_eq!(d.eta_root(), Some(19800.5));
        assert!(eta_at(&d, 19790.0) > 0.0 && eta_at(&d, 19810.0) < 0.0);
    }

    #[test]
    fn generic_eta_matches_printed_closed_forms() {
        let nu: f64 = 7.5 - 1.0;
        let d = make_dde(&FunctionSpec::f01_negated(7.5), DdeDirection::F01 { m: 2 }).unwrap();
        for x in [0.3, 2.0, 15.0, 90.0] {
            let eta = (nu - 1.0).powi(2) / (2.0 * x) - 1.0;
            assert!((d.eta(x) - eta).abs() < 1e-12 * eta.abs().max(1.0), "x={x}");
        }
        let (a, c) = (-7.3_f64, 2.6);
        let n = ((c - a) * (1.0 - a)).sqrt();
        let d = make_dde(&FunctionSpec::f11(a, c), DdeDirection::F11 { k: 1, m: 0 }).unwrap();
        for x in [0.3, 2.0, 15.0] {
            let eta = -(2.0 * a - c - 1.0 + x) / (2.0 * n);
            assert!((d.eta(x) - eta).abs() < 1e-12 * eta.abs().max(1.0), "x={x}");
        }
        // generic route for m=1 agrees with the override
        let d = make_dde(&FunctionSpec::f01_negated(4.2), DdeDirection::F01 { m: 1 }).unwrap();
        for x in [0.5, 3.0, 40.0] {
            let (eta, _) = d.eta_jets(x);
            assert!((eta.value() - d.eta(x)).abs() < 1e-13);
            assert!((d.atilde_jet(x).value() - d.atilde(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn dde_identities_hold_for_every_direction() {
        for d in all_systems() {
            let (lo, hi) = d.domain;
            let hi = hi.min(30.0);
            let samples: Vec<f64> = sample_points(lo, hi, 7).into_iter().filter(|&x| x > 0.05).collect();
            let r = verify_dde_consistency(&d, &samples).unwrap();
            assert!(r < 1e-10, "{} {}: {r}", d.spec, d.direction);
        }
    }

    #[test]
    fn consistency_examples() {
        let d = make_dde(&FunctionSpec::f01_negated(2.5), DdeDirection::F01 { m: 1 }).unwrap();
        assert!(verify_dde_consistency(&d, &[0.5, 2.0, 7.0]).unwrap() < 1e-10);
        let d = make_dde(&FunctionSpec::f11(-5.0, 1.2), DdeDirection::F11 { k: 1, m: 0 }).unwrap();
        assert!(verify_dde_consistency(&d, &[1.0, 5.0, 20.0]).unwrap() < 1e-10);
    }

    #[test]
    fn flipped_sign_is_detected() {
        // contrast with the wrong shift breaks the identities
        let mut d = make_dde(&FunctionSpec::f11(-5.0, 1.2), DdeDirection::F11 { k: 1, m: 0 }).unwrap();
        d.contrast = d.contrast.shifted(0.0, 0.0, 1.0);
        assert!(verify_dde_consistency(&d, &[1.0, 5.0, 20.0]).unwrap() > 1e-3);
    }

    #[test]
    fn change_of_variable_identities() {
        for d in all_systems() {
            let (lo, hi) = d.domain;
            for x in sample_points(lo, hi.min(1e3), 100) {
                let z = d.z_of_x(x);
                let back = d.x_of_z(z);
                assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300) + 1e-15, "{} {}: {x} -> {back}", d.spec, d.direction);
                let h = 1e-6 * x.min(1.0 - x).abs().max(1e-3).min(x);
                let h = if d.domain.1 == 1.0 { h.min((1.0 - x) / 2.0) } else { h.min(x / 2.0) };
                let dz = (d.z_of_x(x + h) - d.z_of_x(x - h)) / (2.0 * h);
                let de = -d.de_product(x);
                assert!((dz * dz - de).abs() < 1e-6 * de, "{} {}: x={x} {} vs {de}", d.spec, d.direction, dz * dz);
                assert!(dz > 0.0);
            }
        }
    }

    #[test]
    fn atilde_identity_by_finite_differences() {
        for d in all_systems() {
            let (lo, hi) = d.domain;
            for x in sample_points(lo, hi.min(20.0), 20) {
                if x < 1e-3 || (d.domain.1 == 1.0 && x > 1.0 - 1e-3) {
                    continue;
                }
                let z = d.z_of_x(x);
                let right = if d.domain.1 == 1.0 { (1.0 + x) / 2.0 } else { 2.0 * x };
                let h = 1e-2 * (z - d.z_of_x(x / 2.0)).min(d.z_of_x(right) - z);
                let fd = |f: &dyn Fn(f64) -> f64| {
                    let g = |dz: f64| f(d.x_of_z(z + dz));
                    (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h)
                };
                let deta = fd(&|x| d.eta(x));
                let eta = d.eta(x);
                let want = 1.0 + deta - eta * eta;
                let got = d.atilde(x);
                assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{} {}: x={x} {got} vs {want}", d.spec, d.direction);
                let dat = fd(&|x| d.atilde(x));
                assert!((d.atilde_dz(x) - dat).abs() < 1e-5 * dat.abs().max(1.0), "{} {}", d.spec, d.direction);
            }
        }
    }

    #[test]
    fn degeneracies_reported() {
        let f = FunctionSpec::f11(-3.0, 1.0);
        assert!(matches!(make_dde(&f, DdeDirection::F11 { k: 1, m: 1 }), Err(Error::DegenerateDirection { .. })));
        let f = FunctionSpec::f21(-3.0, 4.0, 2.0);
        assert!(matches!(make_dde(&f, DdeDirection::F21 { k: 1, l: 1, m: 2 }), Err(Error::DegenerateDirection { .. })));
        let f = FunctionSpec::f21(-3.0, 4.5, 0.5);
        assert!(matches!(make_dde(&f, DdeDirection::F21 { k: 1, l: 1, m: 0 }), Err(Error::DegenerateDirection { .. })));
        assert!(matches!(
            make_dde(&FunctionSpec::f01(1.5), DdeDirection::F01 { m: 1 }),
            Err(Error::NotOscillatoryHere { .. })
        ));
        // d·e > 0 for a=1.5, c=2 in (1,0)
        assert!(matches!(
            make_dde(&FunctionSpec::f11(1.5, 2.0), DdeDirection::F11 { k: 1, m: 0 }),
            Err(Error::NotOscillatoryHere { .. })
        ));
    }

    #[test]
    fn parse_and_display() {
        let d = DdeDirection::parse(Family::F21, "1,-1,0").unwrap();
        assert_eq!(d, DdeDirection::F21 { k: 1, l: -1, m: 0 });
        assert_eq!(d.to_string(), "(1,-1,0)");
        assert!(DdeDirection::parse(Family::F11, "2,0").is_err());
        assert!(DdeDirection::parse(Family::F11, "1,0,0").is_err());
    }

    #[test]
    fn d_metric_ordering_for_kummer() {
        // D(1,1) < D(1,0) exactly below x = c - a
        let f = FunctionSpec::f11(-20.0, 3.5);
        let d11 = make_dde(&f, DdeDirection::F11 { k: 1, m: 1 }).unwrap();
        let d10 = make_dde(&f, DdeDirection::F11 { k: 1, m: 0 }).unwrap();
        for x in sample_points(0.0, 100.0, 50) {
            assert_eq!(d11.d_metric(x) < d10.d_metric(x), x < 23.5, "x={x}");
        }
    }
}
