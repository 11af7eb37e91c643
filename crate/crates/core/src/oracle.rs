//! Brute-force zeros by sign scan and bisection, independent of the
//! fixed-point machinery. Slow on purpose.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{eval_stable, polynomial_root_bound};
use crate::select::{normalize, select_dde, NormalizedProblem};
use crate::spec::FunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSpace {
    UniformX,
    /// Uniform in the change of variable of the DDE the selector picks.
    UniformZ,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub grid_points: usize,
    /// Relative bracket width at which bisection stops.
    pub bisection_tol: f64,
    pub grid_space: GridSpace,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_points: 20_000, bisection_tol: 1e-14, grid_space: GridSpace::UniformZ }
    }
}

const REFINEMENTS: usize = 4;

/// Sign of the function along a curve `u = path(s)`, `s ∈ [0, 1]`, in
/// canonical coordinates.
struct Scan<'a> {
    problem: &'a NormalizedProblem,
    path: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl Scan<'_> {
    /// `None` where the function cannot be evaluated (singular ends).
    fn value(&self, s: f64) -> Option<f64> {
        let u = (self.path)(s);
        let v = eval_stable(&self.problem.spec, u).ok()?.value;
        v.is_finite().then_some(v)
    }

    /// Parameter brackets `(s0, s1)` of sign changes on an `n`-cell grid.
    fn brackets(&self, n: usize) -> (Vec<(f64, f64)>, bool) {
        let mut out: Vec<(usize, f64, f64)> = vec![];
        let mut last: Option<(usize, f64, f64)> = None;
        for i in 0..=n {
            let s = i as f64 / n as f64;
            let Some(v) = self.value(s) else { continue };
            if v == 0.0 {
                // exact zero: bracket it tightly and restart the sign chain
                out.push((i, s, s));
                last = None;
                continue;
            }
            if let Some((_, sp, vp)) = last {
                if vp.signum() != v.signum() {
                    out.push((i, sp, s));
                }
            }
            last = Some((i, s, v));
        }
        let adjacent = out.windows(2).any(|w| w[1].0 == w[0].0 + 1);
        (out.into_iter().map(|(_, a, b)| (a, b)).collect(), adjacent)
    }

    fn bisect(&self, mut a: f64, mut b: f64, tol: f64) -> f64 {
        if a == b {
            return a;
        }
        let Some(mut va) = self.value(a) else { return 0.5 * (a + b) };
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let (ua, ub) = ((self.path)(a), (self.path)(b));
            if (ub - ua).abs() <= tol * ua.abs().max(ub.abs()) {
                break;
            }
            match self.value(m) {
                Some(0.0) => return m,
                Some(vm) if vm.signum() == va.signum() => {
                    a = m;
                    va = vm;
                }
                _ => b = m,
            }
        }
        0.5 * (a + b)
    }
}

/// Zeros of `spec` on the open `interval`, sorted.
pub fn brute_force_zeros(spec: &FunctionSpec, interval: (f64, f64), cfg: &OracleConfig) -> Result<Vec<f64>> {
    scan_zeros(spec, interval, cfg, false)
}

fn scan_zeros(spec: &FunctionSpec, interval: (f64, f64), cfg: &OracleConfig, compactify: bool) -> Result<Vec<f64>> {
    if cfg.grid_points < 2 {
        return Err(Error::InvalidInput("grid_points must be at least 2".into()));
    }
    let problem = normalize(spec, interval)?;
    let (mut lo, mut hi) = problem.canonical_interval;
    let unbounded = lo.is_infinite() || hi.is_infinite();
    if unbounded {
        match polynomial_root_bound(&problem.spec) {
            Some(bound) => {
                let raw = |u: f64| if problem.spec.negated { -u } else { u };
                let cap = bound * (1.0 + 1e-9) + 1e-300;
                lo = lo.max(raw(-cap).min(raw(cap)));
                hi = hi.min(raw(-cap).max(raw(cap)));
            }
            None if compactify => {}
            None => {
                return Err(Error::InvalidInput(
                    "unbounded interval: only terminating series have finitely many zeros".into(),
                ))
            }
        }
    }
    let path: Box<dyn Fn(f64) -> f64> = match (cfg.grid_space, z_map(&problem, lo, hi)) {
        (_, _) if lo.is_infinite() || hi.is_infinite() => Box::new(move |s: f64| compact(lo, hi, s)),
        (GridSpace::UniformZ, Some((zl, zh, x_of_z))) => Box::new(move |s: f64| {
            let u = x_of_z(zl + (zh - zl) * s);
            u.clamp(lo, hi)
        }),
        _ => Box::new(move |s: f64| lo + (hi - lo) * s),
    };
    let scan = Scan { problem: &problem, path };

    let mut n = cfg.grid_points;
    let mut brackets = vec![];
    for round in 0..=REFINEMENTS {
        let (found, adjacent) = scan.brackets(n);
        let coarse = scan.brackets(n / 2).0.len();
        brackets = found;
        if !(adjacent && coarse != brackets.len()) {
            break;
        }
        if round == REFINEMENTS {
            let s = brackets.first().map(|b| b.0).unwrap_or(0.0);
            return Err(Error::GridTooCoarse { x: problem.pullback((scan.path)(s)) });
        }
        n *= 4;
    }
    let mut zeros: Vec<f64> = brackets
        .into_iter()
        .map(|(a, b)| problem.pullback((scan.path)(scan.bisect(a, b, cfg.bisection_tol))))
        .filter(|&x| x > interval.0 && x < interval.1)
        .collect();
    zeros.sort_by(f64::total_cmp);
    zeros.dedup();
    Ok(zeros)
}

/// `[0, 1]` onto an interval with at least one infinite end.
fn compact(lo: f64, hi: f64, s: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, false) => lo + s / (1.0 - s),
        (false, true) => hi - (1.0 - s) / s,
        _ => (std::f64::consts::PI * (s - 0.5)).tan(),
    }
}

type ZInverse = Box<dyn Fn(f64) -> f64>;

/// `z` range and inverse map of the DDE used on the first selected piece,
/// when one is available and finite on `[lo, hi]`.
fn z_map(problem: &NormalizedProblem, lo: f64, hi: f64) -> Option<(f64, f64, ZInverse)> {
    let pieces = select_dde(problem).ok()?;
    let dde = pieces.into_iter().next()?.dde;
    let zmap = dde.zmap;
    let (dlo, dhi) = dde.domain;
    // keep the scan inside the open domain so the inverse stays finite
    let shrink = 1e-15 * (hi - lo).max(1.0);
    let zl = zmap.z(if lo <= dlo { dlo + shrink } else { lo });
    let zh = zmap.z(if hi >= dhi { dhi - shrink } else { hi });
    (zl.is_finite() && zh.is_finite() && zl < zh).then(|| (zl, zh, Box::new(move |z: f64| zmap.x(z)) as ZInverse))
}

/// The unique zero on `interval`, if any. Finding more than one contradicts
/// an at-most-one-zero verdict and is reported as an error. Unbounded
/// intervals are scanned through a compactifying change of variable.
pub fn isolated_zero(spec: &FunctionSpec, interval: (f64, f64)) -> Result<Option<f64>> {
    let cfg = OracleConfig { grid_space: GridSpace::UniformX, ..Default::default() };
    let zeros = scan_zeros(spec, interval, &cfg, true)?;
    match zeros.len() {
        0 => Ok(None),
        1 => Ok(Some(zeros[0])),
        count => Err(Error::MultipleZerosFound { count }),
    }
}
