//! End-to-end zero finding: reduce, check oscillation, pick DDEs, sweep,
//! and map the zeros back to the user's variable.

use serde::Serialize;

use crate::catalog::DdeDirection;
use crate::error::{Error, Result};
use crate::eval::eval_stable;
use crate::fpi::{sweep_with, FpiConfig, StepPolicy, ZeroRecord};
use crate::oracle::isolated_zero;
use crate::oscillation::{check_parameters, check_pointwise, OscillationVerdict};
use crate::select::{normalize, select_dde, select_override, NormalizedProblem, PiecePlan};
use crate::spec::FunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FindOptions {
    pub fpi: FpiConfig,
    /// Forces one direction over the whole canonical interval.
    pub dde: Option<DdeDirection>,
    pub policy: StepPolicy,
}

impl Default for FindOptions {
    fn default() -> Self {
        Self { fpi: FpiConfig::default(), dde: None, policy: StepPolicy::Improved }
    }
}

/// How one piece of the interval was handled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceReport {
    /// In the user's variable.
    pub interval: (f64, f64),
    /// `None` when the piece was searched without a DDE.
    pub dde: Option<DdeDirection>,
    pub verdict: OscillationVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub spec: FunctionSpec,
    pub interval: (f64, f64),
    pub verdict: OscillationVerdict,
    /// Sorted by `x`. The `z` values are in the variable of the DDE that
    /// found each zero.
    pub records: Vec<ZeroRecord>,
    pub total_iterations: usize,
    pub pieces: Vec<PieceReport>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn zeros(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.x).collect()
    }
}

/// All zeros of `spec` on the open `interval`.
pub fn find(spec: &FunctionSpec, interval: (f64, f64), opts: &FindOptions) -> Result<RunReport> {
    let problem = normalize(spec, interval)?;
    let verdict = check_parameters(&problem.spec, problem.canonical_interval);
    let mut report = RunReport {
        spec: *spec,
        interval,
        verdict: verdict.clone(),
        records: vec![],
        total_iterations: 0,
        pieces: vec![],
        warnings: vec![],
    };
    if !verdict.is_oscillatory() && opts.dde.is_none() {
        let records = isolated(&problem, problem.canonical_interval)?;
        report.pieces.push(PieceReport { interval, dde: None, verdict });
        report.records = records;
        return Ok(report);
    }

    let plans = match opts.dde {
        Some(dir) => select_override(&problem, dir)?,
        None => select_dde(&problem)?,
    };
    let seams: Vec<f64> = plans.iter().skip(1).map(|p| p.interval.0).collect();
    let mut records = vec![];
    for plan in &plans {
        let piece = widen_at_seams(plan.interval, &seams, opts.fpi.tol_z);
        let user_piece = user_interval(&problem, plan.interval);
        let local = check_pointwise(&plan.dde, piece);
        if !local.is_oscillatory() && opts.dde.is_none() {
            records.extend(isolated(&problem, piece)?);
            report.pieces.push(PieceReport { interval: user_piece, dde: None, verdict: local });
            continue;
        }
        let (mut found, dde) = sweep_piece(plan, piece, opts, &mut report.warnings).map_err(|e| match e {
            Error::NoConvergence { iterations, last_z, mut partial } => {
                pull_back(&problem, &mut partial);
                let partial = tidy(records.iter().cloned().chain(partial).collect());
                Error::NoConvergence { iterations, last_z, partial }
            }
            e => e,
        })?;
        pull_back(&problem, &mut found);
        records.extend(found);
        report.pieces.push(PieceReport { interval: user_piece, dde: Some(dde), verdict: local });
    }
    report.records = tidy(records);
    report.total_iterations = report.records.iter().map(|r| r.iterations).sum();
    Ok(report)
}

/// Sweeps with the piece's DDE, then with each fallback in turn while the
/// iteration fails to converge.
fn sweep_piece(
    plan: &PiecePlan,
    piece: (f64, f64),
    opts: &FindOptions,
    warnings: &mut Vec<String>,
) -> Result<(Vec<ZeroRecord>, DdeDirection)> {
    let mut first_err = None;
    for dde in std::iter::once(&plan.dde).chain(&plan.fallbacks) {
        match sweep_with(dde, piece, &opts.fpi, opts.policy) {
            Ok(found) => {
                if dde.direction != plan.dde.direction {
                    warnings.push(format!("{} did not converge, used {}", plan.dde.direction, dde.direction));
                }
                return Ok((found, dde.direction));
            }
            Err(e @ Error::NoConvergence { .. }) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.unwrap_or(Error::NoAdmissibleDde))
}

fn isolated(problem: &NormalizedProblem, piece: (f64, f64)) -> Result<Vec<ZeroRecord>> {
    let Some(u) = isolated_zero(&problem.spec, piece)? else { return Ok(vec![]) };
    let residual = eval_stable(&problem.spec, u)?.residual();
    Ok(vec![ZeroRecord { index: 0, x: problem.pullback(u), z: u, iterations: 0, residual, dde: None, seed: u }])
}

/// Interior seams move outward so a zero sitting on one is not lost to the
/// open ends of both neighbours.
fn widen_at_seams(interval: (f64, f64), seams: &[f64], tol: f64) -> (f64, f64) {
    let pad = |x: f64| 4.0 * tol * x.abs().max(1.0);
    let (mut lo, mut hi) = interval;
    if seams.contains(&lo) {
        lo -= pad(lo);
    }
    if seams.contains(&hi) {
        hi += pad(hi);
    }
    (lo, hi)
}

fn user_interval(problem: &NormalizedProblem, piece: (f64, f64)) -> (f64, f64) {
    let (p, q) = (problem.pullback(piece.0), problem.pullback(piece.1));
    let clip = |x: f64| x.clamp(problem.user_interval.0, problem.user_interval.1);
    let (p, q) = (clip(p), clip(q));
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn pull_back(problem: &NormalizedProblem, records: &mut [ZeroRecord]) {
    for r in records {
        r.x = problem.pullback(r.x);
    }
}

/// Sorts by `x`, drops zeros counted twice across a seam, and reindexes.
fn tidy(mut records: Vec<ZeroRecord>) -> Vec<ZeroRecord> {
    records.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<ZeroRecord> = vec![];
    for r in records {
        if let Some(last) = out.last_mut() {
            if (r.x - last.x).abs() <= 1e-11 * r.x.abs().max(last.x.abs()).max(1e-300) {
                if r.residual < last.residual {
                    *last = r;
                }
                continue;
            }
        }
        out.push(r);
    }
    for (i, r) in out.iter_mut().enumerate() {
        r.index = i;
    }
    out
}
