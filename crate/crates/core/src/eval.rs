//! Values and first derivatives of ₀F₁, ₁F₁, ₂F₁ (and terminating ₂F₀) at
//! real arguments.
//!
//! [`eval`] sums the power series directly. [`eval_stable`] routes the cases
//! where the series cancels badly through three-term recurrences:
//! polynomial ₁F₁/₂F₁ are built up in the degree direction, and ₀F₁ on the
//! negative axis is recurred backwards in `c` from a raised parameter where
//! the series is cancellation free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spec::{nonpositive_integer, Family, FunctionSpec};

const EPS: f64 = f64::EPSILON;

/// ₀F₁ series with max |term| above this switch to the backward recurrence.
const F01_SERIES_MAX_TERM: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Largest tolerated `max |term| / |value|` before the result is flagged.
    pub cancellation_budget: f64,
    pub max_terms: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { cancellation_budget: 1e8, max_terms: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    /// Derivative with respect to the problem variable `x`.
    pub derivative: f64,
    /// `scale / |value|`, at least 1; infinite at an exact zero.
    pub cancellation: f64,
    pub terms_used: usize,
    /// Magnitude against which rounding errors in `value` are measured: the
    /// largest series term, or the local amplitude for recurrence routes.
    pub scale: f64,
    /// Set when `cancellation` exceeds the configured budget.
    pub precision_loss: bool,
}

impl EvalResult {
    fn new(value: f64, derivative: f64, scale: f64, terms_used: usize, cfg: &EvalConfig) -> Self {
        let scale = scale.max(value.abs());
        let cancellation = if value == 0.0 { f64::INFINITY } else { (scale / value.abs()).max(1.0) };
        Self {
            value,
            derivative,
            cancellation,
            terms_used,
            scale,
            precision_loss: cancellation > cfg.cancellation_budget,
        }
    }

    /// `|value| / scale`.
    pub fn residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            0.0
        }
    }
}

struct SeriesSum {
    value: f64,
    derivative: f64,
    max_term: f64,
    terms: usize,
    converged: bool,
}

fn check_pole(spec: &FunctionSpec) -> Result<()> {
    if let Some(c) = spec.denominator() {
        if let Some(p) = nonpositive_integer(c) {
            if spec.polynomial_degree().is_none_or(|m| m > p) {
                return Err(Error::PoleAtParameter { param: c });
            }
        }
    }
    Ok(())
}

/// Direct summation at the raw argument `t`; the derivative is `d/dt`.
fn sum_series(spec: &FunctionSpec, t: f64, cfg: &EvalConfig) -> Result<SeriesSum> {
    check_pole(spec)?;
    let degree = spec.polynomial_degree();
    if degree.is_none() {
        match spec.family {
            Family::F21 if t.abs() >= 1.0 => return Err(Error::OutsideDomain { x: t }),
            Family::F20 if t != 0.0 => {
                return Err(Error::UnsupportedSolutionBranch(
                    "non-terminating 2F0 series diverges".into(),
                ))
            }
            _ => {}
        }
    }
    let nums = spec.numerators();
    let den = spec.denominator();

    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    // u_k = coef_k t^(k-1), so the derivative is sum k u_k
    let mut u = 0.0_f64;
    let mut dsum = 0.0_f64;
    let mut max_term = 1.0_f64;
    let mut terms = 1;
    let mut quiet = 0;
    let mut converged = degree.is_some();
    for k in 0..cfg.max_terms {
        if degree.is_some_and(|m| k >= m) {
            break;
        }
        let kf = k as f64;
        let mut r = 1.0 / (kf + 1.0);
        for &p in &nums {
            r *= p + kf;
        }
        if let Some(c) = den {
            r /= c + kf;
        }
        u = if k == 0 { r } else { u * r * t };
        term *= r * t;
        sum += term;
        let dterm = (kf + 1.0) * u;
        dsum += dterm;
        max_term = max_term.max(term.abs());
        terms = k + 2;
        if degree.is_none() {
            if term.abs() <= EPS * sum.abs() && dterm.abs() <= EPS * dsum.abs() {
                quiet += 1;
                if quiet >= 3 {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    Ok(SeriesSum { value: sum, derivative: dsum, max_term, terms, converged })
}

fn raw_arg(spec: &FunctionSpec, x: f64) -> (f64, f64) {
    if spec.negated {
        (-x, -1.0)
    } else {
        (x, 1.0)
    }
}

/// Series evaluation with the default configuration.
pub fn eval(spec: &FunctionSpec, x: f64) -> Result<EvalResult> {
    eval_with(spec, x, &EvalConfig::default())
}

pub fn eval_with(spec: &FunctionSpec, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    let (t, sign) = raw_arg(spec, x);
    let s = sum_series(spec, t, cfg)?;
    let mut r = EvalResult::new(s.value, sign * s.derivative, s.max_term, s.terms, cfg);
    // a truncated non-terminating sum is not trustworthy to full precision
    r.precision_loss |= !s.converged;
    Ok(r)
}

/// Cancellation-safe evaluation with the default configuration.
pub fn eval_stable(spec: &FunctionSpec, x: f64) -> Result<EvalResult> {
    eval_stable_with(spec, x, &EvalConfig::default())
}

pub fn eval_stable_with(spec: &FunctionSpec, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    check_pole(spec)?;
    let (t, sign) = raw_arg(spec, x);
    match spec.family {
        Family::F11 | Family::F21 if spec.polynomial_degree().is_some_and(|n| n >= 1) => {
            let (value, draw, scale, steps) = polynomial_recurrence(spec, t)?;
            Ok(EvalResult::new(value, sign * draw, scale, steps.min(cfg.max_terms), cfg))
        }
        Family::F01 if t < 0.0 => {
            let s = sum_series(spec, t, cfg)?;
            if s.max_term <= F01_SERIES_MAX_TERM {
                return Ok(EvalResult::new(s.value, sign * s.derivative, s.max_term, s.terms, cfg));
            }
            let (value, draw, terms) = f01_backward(spec.c, t, cfg)?;
            let derivative = sign * draw;
            let scale = value.hypot(derivative * t.abs().sqrt());
            Ok(EvalResult::new(value, derivative, scale, terms, cfg))
        }
        _ => eval_with(spec, x, cfg),
    }
}

/// Value of the polynomial `₁F₁(-n;c;t)` or `₂F₁(-n,b;c;t)` by the
/// contiguous relation in the first parameter, started from `a = 0, -1`.
/// Returns `(F(-n), F(-n+1))`.
fn degree_recurrence(family: Family, n: usize, b: f64, c: f64, t: f64) -> (f64, f64) {
    let mut prev = 1.0; // F(a + 1)
    let mut cur = match family {
        Family::F11 => 1.0 - t / c,
        _ => 1.0 - b * t / c,
    };
    if n == 0 {
        return (1.0, f64::NAN);
    }
    for k in 1..n {
        let a = -(k as f64);
        let next = match family {
            // (c-a) M(a-1) + (2a-c+t) M(a) - a M(a+1) = 0
            Family::F11 => (a * prev - (2.0 * a - c + t) * cur) / (c - a),
            // (c-a) F(a-1) + (2a-c+(b-a)t) F(a) + a(t-1) F(a+1) = 0
            _ => -((2.0 * a - c + (b - a) * t) * cur + a * (t - 1.0) * prev) / (c - a),
        };
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Returns `(value, d/dt, scale, steps)`.
fn polynomial_recurrence(spec: &FunctionSpec, t: f64) -> Result<(f64, f64, f64, usize)> {
    let (n, other) = match spec.family {
        Family::F11 => (nonpositive_integer(spec.a).expect("polynomial"), 0.0),
        _ => {
            let na = nonpositive_integer(spec.a);
            let nb = nonpositive_integer(spec.b);
            match (na, nb) {
                (Some(na), Some(nb)) if nb < na => (nb, spec.a),
                (Some(na), _) => (na, spec.b),
                (None, Some(nb)) => (nb, spec.a),
                (None, None) => unreachable!("not a polynomial"),
            }
        }
    };
    let c = spec.c;
    let (value, above) = degree_recurrence(spec.family, n, other, c, t);
    // d/dt F(-n, b; c; t) = (-n b / c) F(-n+1, b+1; c+1; t)
    let nf = n as f64;
    let derivative = match spec.family {
        Family::F11 => -nf / c * degree_recurrence(Family::F11, n - 1, 0.0, c + 1.0, t).0,
        _ => -nf * other / c * degree_recurrence(Family::F21, n - 1, other + 1.0, c + 1.0, t).0,
    };
    let scale = if above.is_nan() { value.abs() } else { value.abs().max(above.abs()) };
    Ok((value, derivative, scale, 2 * n))
}

/// `₀F₁(;c;t)` for `t < 0` by backward recurrence in `c`,
/// `f(c-1) = f(c) + t/(c(c-1)) f(c+1)`, started from series values at a
/// raised parameter `C >= 2|t|` where the alternating series has max term 1.
/// Returns `(value, d/dt, normalization terms)`.
fn f01_backward(c: f64, t: f64, cfg: &EvalConfig) -> Result<(f64, f64, usize)> {
    let at = t.abs();
    let steps = (2.0 * at / c.abs()).ceil().max((2.0 * at - c).ceil()).max(1.0) as usize;
    let top = c + steps as f64;
    let s0 = sum_series(&FunctionSpec::f01(top), t, cfg)?;
    let s1 = sum_series(&FunctionSpec::f01(top + 1.0), t, cfg)?;
    let cancellation = (s0.max_term / s0.value.abs()).max(s1.max_term / s1.value.abs());
    if !(cancellation <= cfg.cancellation_budget) {
        return Err(Error::RecurrenceUnstable { cancellation });
    }
    let mut cur = s0.value;
    let mut above = s1.value;
    for i in 0..steps {
        let k = top - i as f64;
        let below = cur + t / (k * (k - 1.0)) * above;
        above = cur;
        cur = below;
    }
    Ok((cur, above / c, s0.terms.max(s1.terms)))
}

/// Largest `r` with `sum_{k>=1} |t_k(r)| <= 1/2`, where `t_k` are the series
/// terms at the raw argument. The function has no zero for `|x| <= r`.
pub fn zero_free_radius(spec: &FunctionSpec) -> f64 {
    let cfg = EvalConfig::default();
    let nums = spec.numerators();
    let den = spec.denominator();
    let degree = spec.polynomial_degree();
    let majorant = |x: f64| -> f64 {
        let mut term = 1.0_f64;
        let mut sum = 0.0_f64;
        for k in 0..cfg.max_terms {
            if degree.is_some_and(|m| k >= m) {
                return sum;
            }
            let kf = k as f64;
            let mut r = x / (kf + 1.0);
            for &p in &nums {
                r *= p + kf;
            }
            if let Some(c) = den {
                r /= c + kf;
            }
            term *= r.abs();
            sum += term;
            if sum > 0.5 {
                return sum;
            }
            if term <= EPS * sum && k > 2 {
                return sum;
            }
        }
        f64::INFINITY
    };
    let mut hi = 1.0;
    while majorant(hi) <= 0.5 {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if majorant(mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Fujiwara bound on the modulus of every root of a terminating series,
/// in the raw argument. `None` for non-polynomial cases.
pub fn polynomial_root_bound(spec: &FunctionSpec) -> Option<f64> {
    let n = spec.polynomial_degree()?;
    if n == 0 {
        return Some(0.0);
    }
    let nums = spec.numerators();
    let den = spec.denominator();
    // ln |c_{j+1} / c_j|
    let log_ratio: Vec<f64> = (0..n)
        .map(|j| {
            let jf = j as f64;
            let mut r = -(jf + 1.0).ln();
            for &p in &nums {
                r += (p + jf).abs().ln();
            }
            if let Some(c) = den {
                r -= (c + jf).abs().ln();
            }
            r
        })
        .collect();
    let mut acc = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 1..=n {
        acc -= log_ratio[n - k];
        best = best.max(acc / k as f64);
    }
    Some(2.0 * best.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn value_at_origin_is_one() {
        let r = eval(&FunctionSpec::f21(1.0, 1.0, 2.0), 0.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.derivative, 0.5);
    }

    #[test]
    fn kummer_one_one_is_exp() {
        let r = eval(&FunctionSpec::f11(1.0, 1.0), 1.0).unwrap();
        assert!(rel(r.value, E) < 1e-15);
    }

    #[test]
    fn gauss_log_closed_form() {
        let r = eval(&FunctionSpec::f21(1.0, 1.0, 2.0), 0.5).unwrap();
        assert!(rel(r.value, 2.0 * LN_2) < 1e-14, "{}", r.value);
    }

    #[test]
    fn laguerre_two_root() {
        let x = 2.0 - 2f64.sqrt();
        let r = eval_stable(&FunctionSpec::f11(-2.0, 1.0), x).unwrap();
        assert!(r.value.abs() < 1e-12 * r.scale);
    }

    #[test]
    fn sine_root_of_f01() {
        let x = -(PI / 2.0).powi(2);
        let r = eval_stable(&FunctionSpec::f01(1.5), x).unwrap();
        assert!(r.value.abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn pole_detected_unless_truncated() {
        assert!(matches!(
            eval(&FunctionSpec::f11(1.0, -2.0), 0.5),
            Err(Error::PoleAtParameter { .. })
        ));
        // degree 30 truncates before (-70)_k vanishes
        assert!(eval(&FunctionSpec::f21(-30.0, -32.0, -70.0), 0.5).is_ok());
        assert!(eval(&FunctionSpec::f21(-3.0, 2.0, -2.0), 0.5).is_err());
    }

    #[test]
    fn gauss_series_rejects_outside_unit_disc() {
        assert!(matches!(
            eval(&FunctionSpec::f21(0.5, 0.5, 1.5), 1.2),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(eval(&FunctionSpec::f21(-4.0, 0.5, 1.5), 3.0).is_ok());
    }

    #[test]
    fn terms_capped() {
        let cfg = EvalConfig { max_terms: 5, ..Default::default() };
        let r = eval_with(&FunctionSpec::f11(0.3, 0.7), 20.0, &cfg).unwrap();
        assert!(r.terms_used <= 6);
        assert!(r.precision_loss);
    }

    #[test]
    fn half_integer_f01_closed_forms() {
        for i in 1..=100 {
            let t = 0.37 * i as f64;
            let s = 2.0 * t.sqrt();
            let sin = eval_stable(&FunctionSpec::f01(1.5), -t).unwrap();
            let cos = eval_stable(&FunctionSpec::f01(0.5), -t).unwrap();
            // absolute accuracy relative to the amplitude near zeros
            assert!((sin.value - s.sin() / s).abs() < 1e-12 * (1.0 / s).max(sin.value.abs()), "t={t}");
            assert!((cos.value - s.cos()).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn exp_and_log_closed_forms_on_grid() {
        for i in 1..=100 {
            let x = -5.0 + 0.1 * i as f64;
            let r = eval_stable(&FunctionSpec::f11(1.0, 1.0), x).unwrap();
            assert!(rel(r.value, x.exp()) < 1e-12, "x={x}");
            let u = 0.0099 * i as f64;
            let r = eval_stable(&FunctionSpec::f21(1.0, 1.0, 2.0), u).unwrap();
            assert!(rel(r.value, -(-u).ln_1p() / u) < 1e-12, "u={u}");
        }
    }

    #[test]
    fn polynomial_routes_agree() {
        for n in 1..=30 {
            for &(family, b, c) in &[(Family::F11, 0.0, 1.5), (Family::F21, 3.5, 2.5), (Family::F21, -40.0, -45.0)] {
                let spec = FunctionSpec { family, a: -(n as f64), b, c, negated: false };
                for i in 0..20 {
                    let x = 0.05 * i as f64;
                    let s = eval(&spec, x).unwrap();
                    if s.cancellation >= 1e3 {
                        continue;
                    }
                    let r = eval_stable(&spec, x).unwrap();
                    assert!(rel(r.value, s.value) < 1e-12, "{spec} x={x}: {} vs {}", r.value, s.value);
                    assert!((r.derivative - s.derivative).abs() < 1e-10 * s.derivative.abs().max(s.scale));
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let specs = [
            FunctionSpec::f01_negated(2.3),
            FunctionSpec::f11(-7.0, 1.2),
            FunctionSpec::f11(-2.5, 3.1),
            FunctionSpec::f21(-6.0, 4.5, 1.5),
            FunctionSpec::f21(0.3, 0.4, 1.9),
        ];
        for spec in &specs {
            for i in 1..10 {
                let x = 0.09 * i as f64 * if spec.family == Family::F01 { 30.0 } else { 1.0 };
                let r = eval_stable(spec, x).unwrap();
                if r.cancellation >= 1e3 {
                    continue;
                }
                let h = 1e-6 * x.abs().max(1.0);
                let fd = (eval_stable(spec, x + h).unwrap().value - eval_stable(spec, x - h).unwrap().value) / (2.0 * h);
                assert!(rel(r.derivative, fd) < 1e-6, "{spec} x={x}: {} vs {fd}", r.derivative);
            }
        }
    }

    #[test]
    fn backward_recurrence_matches_series_at_moderate_order() {
        // series is still accurate to ~1e-13 here, recurrence route must agree
        for &(c, t) in &[(3.5, -30.0), (11.0, -80.0), (0.7, -20.0)] {
            let spec = FunctionSpec::f01(c);
            let s = eval(&spec, t).unwrap();
            let (v, d, _) = f01_backward(c, t, &EvalConfig::default()).unwrap();
            assert!((v - s.value).abs() < 1e-11 * s.scale, "c={c}: {v} vs {}", s.value);
            assert!((d - s.derivative).abs() < 1e-11 * s.scale);
        }
    }

    #[test]
    fn large_order_sign_pattern() {
        // 0F1(;201;-x) = Γ(201) x^-100 J_200(2√x); first zero of J_200 is
        // at 211.029, i.e. x = 11133.33.
        let spec = FunctionSpec::f01(201.0);
        let mut changes = vec![];
        let mut prev = eval_stable(&spec, -10000.0).unwrap().value;
        assert!(prev > 0.0);
        for i in 1..=400 {
            let x = 10000.0 + 5.0 * i as f64;
            let v = eval_stable(&spec, -x).unwrap().value;
            if v.signum() != prev.signum() {
                changes.push(x);
            }
            prev = v;
        }
        assert!(!changes.is_empty());
        assert!(changes[0] > 11133.33 && changes[0] - 5.0 < 11133.33, "{changes:?}");
    }

    #[test]
    fn zero_free_radius_is_zero_free() {
        let r = zero_free_radius(&FunctionSpec::f01_negated(1.5));
        // first zero of sin(2√x)/(2√x) at (π/2)²
        assert!(r > 0.1 && r < (PI / 2.0).powi(2));
        let spec = FunctionSpec::f11(-50.0, 1e-4);
        let r = zero_free_radius(&spec);
        assert!(r > 0.0 && eval_stable(&spec, r).unwrap().value > 0.4);
    }

    #[test]
    fn root_bound_covers_laguerre_roots() {
        // largest zero of L_2 is 2 + √2
        let b = polynomial_root_bound(&FunctionSpec::f11(-2.0, 1.0)).unwrap();
        assert!(b >= 2.0 + 2f64.sqrt());
        assert!(polynomial_root_bound(&FunctionSpec::f11(-2.5, 1.0)).is_none());
    }
}
