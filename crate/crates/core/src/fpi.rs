//! Fixed-point iteration `T(z) = z - atan H(z)` and the sweeps that
//! enumerate every zero of an interval with it.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::catalog::{sample_points, DdeDirection, DdeSystem};
use crate::error::{Error, Result};
use crate::eval::{eval_stable, polynomial_root_bound, zero_free_radius};
use crate::spec::Family;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpiConfig {
    /// Convergence threshold on `|T(z) - z|`, relative to `max(1, |z|)`.
    pub tol_z: f64,
    pub max_iter_per_zero: usize,
    pub max_zeros: usize,
}

impl Default for FpiConfig {
    fn default() -> Self {
        Self { tol_z: 1e-13, max_iter_per_zero: 100, max_zeros: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub index: usize,
    pub x: f64,
    pub z: f64,
    /// Applications of `T` after the first, so an exact seed costs 0.
    pub iterations: usize,
    /// `|y_n(x)|` relative to the evaluation scale.
    pub residual: f64,
    /// `None` for a zero located without a DDE.
    pub dde: Option<DdeDirection>,
    /// Starting value the iteration converged from.
    pub seed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepMode {
    Forward,
    Backward,
    /// Backward below `split_z`, forward above it.
    Expansive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepPolicy {
    FixedHalfPi,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPlan {
    pub mode: SweepMode,
    pub z_lo: f64,
    pub z_hi: f64,
    pub z_start: f64,
    pub split_z: Option<f64>,
    pub step_policy: StepPolicy,
}

impl SweepPlan {
    fn direction(&self) -> f64 {
        match self.mode {
            SweepMode::Backward => -1.0,
            _ => 1.0,
        }
    }
}

/// `|H|` beyond which `z` is taken to sit on a pole of `H`.
const POLE_H: f64 = 1e12;

/// Iterations after which a non-converging run is checked for a zero ahead.
const RUNAWAY_CHECK: usize = 12;

/// `H = sign(d_n) √(-e_n/d_n) y_n / y_{n-1}` at `x(z)`.
pub fn ratio_h(dde: &DdeSystem, z: f64) -> Result<f64> {
    let x = dde.x_of_z(z);
    let (lo, hi) = dde.domain;
    if !(x > lo && x < hi) {
        return Err(Error::DomainExit { z });
    }
    let (yn, ym) = dde.eval_pair(x)?;
    let [_, _, d, e] = dde.coefficients(x);
    Ok(d.signum() * (-e / d).sqrt() * yn.value / ym.value)
}

fn step(dde: &DdeSystem, z: f64, dir: f64) -> Result<f64> {
    let h = ratio_h(dde, z)?;
    let t = if h.abs() > POLE_H && dir != 0.0 { -dir * FRAC_PI_2 } else { h.atan() };
    Ok(z - t)
}

fn converged(dz: f64, z: f64, tol: f64) -> bool {
    dz.abs() < tol * z.abs().max(1.0)
}

/// Iterates `T` from `z0` to its limit; returns `(z*, iterations)`.
pub fn fixed_point(dde: &DdeSystem, z0: f64, cfg: &FpiConfig) -> Result<(f64, usize)> {
    let trace = fixed_point_trace(dde, z0, cfg)?;
    let z = *trace.last().expect("non-empty trace");
    Ok((z, trace.len() - 3))
}

/// Every iterate from `z0` on; the accepted value closes the trace twice.
pub fn fixed_point_trace(dde: &DdeSystem, z0: f64, cfg: &FpiConfig) -> Result<Vec<f64>> {
    match iterate(dde, z0, 0.0, None, cfg)? {
        Outcome::Converged(trace) => Ok(trace),
        Outcome::NothingAhead => unreachable!("no run-away check without a far end"),
    }
}

enum Outcome {
    Converged(Vec<f64>),
    /// Iterates ran away and no sign change remains before the far end.
    NothingAhead,
}

fn iterate(dde: &DdeSystem, z0: f64, dir: f64, far: Option<f64>, cfg: &FpiConfig) -> Result<Outcome> {
    let mut trace = vec![z0];
    let mut z = z0;
    let mut last_dz = f64::INFINITY;
    let mut scanned = false;
    let limit = cfg.max_iter_per_zero + 1;
    for n in 1..=limit {
        let zn = step(dde, z, dir)?;
        trace.push(zn);
        let dz = zn - z;
        if converged(dz, zn, cfg.tol_z) {
            trace.push(zn);
            return Ok(Outcome::Converged(trace));
        }
        // rounding floor: steps stopped shrinking while already tiny
        if n > 3 && dz.abs() >= last_dz && dz.abs() < 1e-9 * zn.abs().max(1.0) {
            trace.push(zn);
            return Ok(Outcome::Converged(trace));
        }
        last_dz = dz.abs();
        z = zn;
        if let Some(far) = far {
            // past the first step iterates approach their limit monotonically
            if n >= 2 && dir * (z - far) > 0.0 {
                return Ok(Outcome::NothingAhead);
            }
            // an iterate already sitting on its zero gives the scan a noisy sign
            if !scanned && n >= RUNAWAY_CHECK && dz.abs() > 1e-3 {
                scanned = true;
                if !sign_change_ahead(dde, z, far)? {
                    return Ok(Outcome::NothingAhead);
                }
            }
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter_per_zero, last_z: z, partial: vec![] })
}

/// Scans `y_n` from `z` toward `far` in steps below the minimal zero
/// spacing and reports whether it changes sign.
fn sign_change_ahead(dde: &DdeSystem, z: f64, far: f64) -> Result<bool> {
    if (far - z).abs() < 1e-12 || !z.is_finite() {
        return Ok(false);
    }
    let (lo, hi) = dde.domain;
    let value_at = |z: f64| -> Result<f64> {
        let x = dde.x_of_z(z).clamp(lo, hi);
        if !(x > lo && x < hi) {
            return Ok(f64::NAN);
        }
        Ok(eval_stable(&dde.spec, x)?.value)
    };
    let n = ((far - z).abs() / (PI / 4.0)).ceil().max(1.0) as usize;
    let mut prev = value_at(z)?;
    for i in 1..=n {
        let zi = z + (far - z) * i as f64 / n as f64;
        let v = value_at(zi)?;
        if v.is_nan() {
            continue;
        }
        if prev.is_nan() || v == 0.0 {
            prev = v;
            if v == 0.0 {
                return Ok(true);
            }
            continue;
        }
        if v.signum() != prev.signum() {
            return Ok(true);
        }
        prev = v;
    }
    Ok(false)
}

/// Start for the next zero after `prev` (and `prev2`, when known).
pub fn next_start(prev: &ZeroRecord, prev2: Option<&ZeroRecord>, dde: &DdeSystem, plan: &SweepPlan) -> f64 {
    next_start_z(prev.z, prev2.map(|r| r.z), dde, plan.direction(), plan.step_policy)
}

fn next_start_z(prev: f64, prev2: Option<f64>, dde: &DdeSystem, dir: f64, policy: StepPolicy) -> f64 {
    if policy == StepPolicy::Improved {
        if let Some(p2) = prev2 {
            let delta = (prev - p2).abs();
            if improved_gate(dde, p2, prev + dir * 1.5 * delta) {
                return prev + dir * delta;
            }
        }
    }
    prev + dir * FRAC_PI_2
}

/// `η · dÃ/dz >= 0` at a few points between `za` and `zb`.
fn improved_gate(dde: &DdeSystem, za: f64, zb: f64) -> bool {
    let (lo, hi) = dde.domain;
    (0..=6).all(|i| {
        let x = dde.x_of_z(za + (zb - za) * i as f64 / 6.0);
        x > lo && x < hi && dde.eta(x) * dde.atilde_dz(x) >= 0.0
    })
}

/// Sub-interval of `interval` (inside the domain) that can hold zeros, with
/// finite `z` images. `None` when it is provably zero free.
fn effective_interval(dde: &DdeSystem, interval: (f64, f64)) -> Result<Option<(f64, f64)>> {
    let (dlo, dhi) = dde.domain;
    let mut lo = interval.0.max(dlo);
    let mut hi = interval.1.min(dhi);
    let r = zero_free_radius(&dde.spec);
    if r.is_finite() {
        lo = lo.max(r);
    } else {
        return Ok(None);
    }
    if hi.is_infinite() {
        match polynomial_root_bound(&dde.spec) {
            Some(b) => hi = b * (1.0 + 1e-9) + 1e-300,
            None => {
                return Err(Error::InvalidInput(
                    "unbounded interval: only terminating series have finitely many zeros".into(),
                ))
            }
        }
    }
    if hi >= dhi && dde.spec.family == Family::F21 {
        hi = 1.0 - 1e-15;
    }
    Ok((lo < hi).then_some((lo, hi)))
}

/// Sign of η with a dead band for identically vanishing cases.
fn eta_sign(dde: &DdeSystem, x: f64) -> i8 {
    let e = dde.eta(x);
    if e > 1e-14 {
        1
    } else if e < -1e-14 {
        -1
    } else {
        0
    }
}

/// Points in `(lo, hi)` where η changes sign.
fn eta_crossings(dde: &DdeSystem, lo: f64, hi: f64) -> Vec<f64> {
    if let Some(r) = dde.eta_root() {
        return if r > lo && r < hi { vec![r] } else { vec![] };
    }
    let grid: Vec<f64> = std::iter::once(lo)
        .chain(sample_points(lo, hi, 256))
        .chain(std::iter::once(hi))
        .collect();
    let mut out = vec![];
    let mut last: Option<(f64, i8)> = None;
    for &x in &grid {
        let s = eta_sign(dde, x);
        if s == 0 {
            continue;
        }
        if let Some((xp, sp)) = last {
            if sp != s {
                let (mut a, mut b) = (xp, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if eta_sign(dde, m) == sp {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        last = Some((x, s));
    }
    out
}

/// Sweep plans covering `interval`: one per stretch of constant η sign,
/// with a backward stretch followed by a forward one merged into an
/// expansive plan.
pub fn plan_sweeps(dde: &DdeSystem, interval: (f64, f64), policy: StepPolicy) -> Result<Vec<SweepPlan>> {
    let Some((lo, hi)) = effective_interval(dde, interval)? else {
        return Ok(vec![]);
    };
    let mut cuts = vec![lo];
    cuts.extend(eta_crossings(dde, lo, hi));
    cuts.push(hi);
    let mut plans: Vec<SweepPlan> = vec![];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = sample_points(a, b, 3)[1];
        let (za, zb) = (dde.z_of_x(a), dde.z_of_x(b));
        let backward = eta_sign(dde, mid) > 0;
        if !backward {
            if let Some(last) = plans.last_mut() {
                if last.mode == SweepMode::Backward {
                    *last = SweepPlan {
                        mode: SweepMode::Expansive,
                        z_hi: zb,
                        split_z: Some(za),
                        z_start: za,
                        ..*last
                    };
                    continue;
                }
            }
        }
        let (mode, z_start) = if backward { (SweepMode::Backward, zb) } else { (SweepMode::Forward, za) };
        plans.push(SweepPlan { mode, z_lo: za, z_hi: zb, z_start, split_z: None, step_policy: policy });
    }
    Ok(plans)
}

enum Attempt {
    Zero(f64, usize),
    NothingAhead,
    Exit,
}

struct Found {
    z: f64,
    iterations: usize,
    seed: f64,
}

/// One directional sweep over `[za, zb]`.
fn directional(
    dde: &DdeSystem,
    za: f64,
    zb: f64,
    dir: f64,
    policy: StepPolicy,
    cfg: &FpiConfig,
    out: &mut Vec<Found>,
) -> Result<()> {
    let (start, far) = if dir > 0.0 { (za, zb) } else { (zb, za) };
    let z_s = start + dir * 1e-9 * (zb - za);
    let beyond = |z: f64| dir * (z - far) > 0.0;
    let repeat_tol = |z: f64| 2.0 * cfg.tol_z * z.abs().max(1.0);

    let run = |seed: f64| -> Result<Attempt> {
        match iterate(dde, seed, dir, Some(far), cfg) {
            Ok(Outcome::Converged(trace)) => Ok(Attempt::Zero(*trace.last().unwrap(), trace.len() - 3)),
            Ok(Outcome::NothingAhead) => Ok(Attempt::NothingAhead),
            Err(Error::DomainExit { .. }) => Ok(Attempt::Exit),
            Err(e) => Err(e),
        }
    };

    // first zero, re-seeding while the limit falls behind the start or the
    // seed's branch leaves the domain
    let max_reseed = ((zb - za) / FRAC_PI_2).ceil() as usize + 1;
    let mut seed = z_s;
    let mut prev: Option<f64> = None;
    for k in 1..=max_reseed {
        let (z, it) = match run(seed)? {
            Attempt::Zero(z, it) => (z, it),
            Attempt::NothingAhead => return Ok(()),
            Attempt::Exit => (f64::NAN, 0),
        };
        if z.is_nan() || dir * (z - z_s) < 0.0 {
            seed = z_s + dir * k as f64 * FRAC_PI_2;
            if beyond(seed) {
                return Ok(());
            }
            continue;
        }
        out.push(Found { z, iterations: it, seed });
        if beyond(z) {
            return Ok(());
        }
        prev = Some(z);
        break;
    }
    let Some(mut prev) = prev else { return Ok(()) };
    let mut prev2: Option<f64> = None;
    while out.len() < cfg.max_zeros {
        let seed = next_start_z(prev, prev2, dde, dir, policy);
        let Attempt::Zero(z, it) = run(seed)? else { return Ok(()) };
        if dir * (z - prev) <= repeat_tol(z) {
            return Ok(());
        }
        out.push(Found { z, iterations: it, seed });
        if beyond(z) {
            return Ok(());
        }
        prev2 = Some(prev);
        prev = z;
    }
    Ok(())
}

/// All zeros of `dde.spec` in the open `interval`, improved steps enabled.
pub fn sweep(dde: &DdeSystem, interval: (f64, f64), cfg: &FpiConfig) -> Result<Vec<ZeroRecord>> {
    sweep_with(dde, interval, cfg, StepPolicy::Improved)
}

pub fn sweep_with(
    dde: &DdeSystem,
    interval: (f64, f64),
    cfg: &FpiConfig,
    policy: StepPolicy,
) -> Result<Vec<ZeroRecord>> {
    let plans = plan_sweeps(dde, interval, policy)?;
    let mut found = vec![];
    let mut failure = None;
    for plan in &plans {
        let result = match (plan.mode, plan.split_z) {
            (SweepMode::Expansive, Some(s)) => directional(dde, plan.z_lo, s, -1.0, policy, cfg, &mut found)
                .and_then(|_| directional(dde, s, plan.z_hi, 1.0, policy, cfg, &mut found)),
            _ => directional(dde, plan.z_lo, plan.z_hi, plan.direction(), policy, cfg, &mut found),
        };
        if let Err(e) = result {
            failure = Some(e);
            break;
        }
    }
    let records = finish(dde, interval, cfg, found)?;
    match failure {
        Some(Error::NoConvergence { iterations, last_z, .. }) => {
            Err(Error::NoConvergence { iterations, last_z, partial: records })
        }
        Some(e) => Err(e),
        None => Ok(records),
    }
}

/// Whether `y_n` has opposite signs at `z ± h`. Fixed points of `T` where
/// `H` vanishes through its coefficient factor (at a domain end) fail this.
fn changes_sign(dde: &DdeSystem, z: f64, h: f64) -> bool {
    let (lo, hi) = dde.domain;
    let value = |z: f64| {
        let x = dde.x_of_z(z);
        (x > lo && x < hi).then(|| eval_stable(&dde.spec, x).ok().map(|r| r.value)).flatten()
    };
    matches!((value(z - h), value(z + h)), (Some(p), Some(q)) if p * q <= 0.0)
}

/// Keeps zeros strictly inside `interval`, sorts, and merges duplicates.
/// Fixed points that are not zeros are dropped.
fn finish(dde: &DdeSystem, interval: (f64, f64), cfg: &FpiConfig, found: Vec<Found>) -> Result<Vec<ZeroRecord>> {
    let mut records = vec![];
    for f in found {
        let x = dde.x_of_z(f.z);
        if !(x > interval.0 && x < interval.1) {
            continue;
        }
        let residual = eval_stable(&dde.spec, x)?.residual();
        if residual > 1e-8 && !changes_sign(dde, f.z, 1e3 * cfg.tol_z * f.z.abs().max(1.0)) {
            continue;
        }
        records.push(ZeroRecord { index: 0, x, z: f.z, iterations: f.iterations, residual, dde: Some(dde.direction), seed: f.seed });
    }
    records.sort_by(|a, b| a.z.total_cmp(&b.z));
    let mut merged: Vec<ZeroRecord> = vec![];
    for r in records {
        if let Some(last) = merged.last_mut() {
            if (r.z - last.z).abs() <= 4.0 * cfg.tol_z * r.z.abs().max(1.0) {
                if r.residual < last.residual {
                    *last = r;
                }
                continue;
            }
        }
        merged.push(r);
    }
    for (i, r) in merged.iter_mut().enumerate() {
        r.index = i;
    }
    Ok(merged)
}
