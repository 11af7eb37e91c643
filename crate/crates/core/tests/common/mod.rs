#![allow(dead_code)]

use hyperzero::fpi::fixed_point_trace;
use hyperzero::*;

pub type Check = std::result::Result<(), String>;

/// The DDE a record was found with, rebuilt on the canonical problem.
fn record_dde(problem: &NormalizedProblem, dir: DdeDirection) -> DdeSystem {
    make_dde_unchecked(&problem.spec, dir).expect("direction used by a sweep must rebuild")
}

fn problem_of(report: &RunReport) -> NormalizedProblem {
    normalize(&report.spec, report.interval).expect("report came from a valid problem")
}

/// `y_n` changes sign across `[u - δ, u + δ]` with `δ = 10·tol·max(1,|z|)·|dx/dz|`.
pub fn bracketing(report: &RunReport, tol_z: f64) -> Check {
    let problem = problem_of(report);
    for r in &report.records {
        let Some(dir) = r.dde else { continue };
        let dde = record_dde(&problem, dir);
        let u = problem.forward(r.x);
        let delta = 10.0 * tol_z * r.z.abs().max(1.0) / dde.de_product(u).abs().sqrt();
        let lo = eval_stable(&problem.spec, u - delta).map_err(|e| e.to_string())?.value;
        let hi = eval_stable(&problem.spec, u + delta).map_err(|e| e.to_string())?.value;
        if lo * hi > 0.0 {
            return Err(format!("no sign change around x = {} ({lo:e}, {hi:e})", r.x));
        }
    }
    Ok(())
}

/// Exactly one sign change of the contrast function between consecutive
/// zeros found with the same DDE.
pub fn interlacing(report: &RunReport) -> Check {
    let problem = problem_of(report);
    let mut recs: Vec<&ZeroRecord> = report.records.iter().filter(|r| r.dde.is_some()).collect();
    recs.sort_by(|p, q| problem.forward(p.x).total_cmp(&problem.forward(q.x)));
    for w in recs.windows(2) {
        if w[0].dde != w[1].dde {
            continue;
        }
        let dde = record_dde(&problem, w[0].dde.unwrap());
        let (z0, z1) = (dde.z_of_x(problem.forward(w[0].x)), dde.z_of_x(problem.forward(w[1].x)));
        let n = 128;
        let mut changes = 0;
        let mut last: Option<f64> = None;
        // the contrast does not vanish at zeros of y_n, so the ends are safe
        for i in 0..=n {
            let x = dde.x_of_z(z0 + (z1 - z0) * i as f64 / n as f64);
            let v = eval_stable(&dde.contrast, x).map_err(|e| e.to_string())?.value;
            if let Some(p) = last {
                if p.signum() != v.signum() {
                    changes += 1;
                }
            }
            last = Some(v);
        }
        if changes != 1 {
            return Err(format!("{changes} contrast sign changes between {} and {}", w[0].x, w[1].x));
        }
    }
    Ok(())
}

/// The last three iteration errors obey `e_{k+1} <= C e_k²`,
/// `C = 2·max(1, |η(x*)|)`, for errors above the convergence tolerance.
pub fn quadratic(report: &RunReport, cfg: &FpiConfig) -> Check {
    let problem = problem_of(report);
    for r in &report.records {
        let Some(dir) = r.dde else { continue };
        if r.iterations < 2 {
            continue;
        }
        let dde = record_dde(&problem, dir);
        let trace = fixed_point_trace(&dde, r.seed, cfg).map_err(|e| e.to_string())?;
        let limit = *trace.last().unwrap();
        // below the convergence tolerance errors are rounding, not iteration
        let floor = cfg.tol_z * limit.abs().max(1.0);
        let errs: Vec<f64> = trace[..trace.len() - 1].iter().map(|z| (z - limit).abs()).collect();
        let c = 2.0 * dde.eta(problem.forward(r.x)).abs().max(1.0);
        let tail = &errs[errs.len().saturating_sub(3)..];
        for w in tail.windows(2) {
            if w[1] > floor && w[1] > c * w[0] * w[0] {
                return Err(format!("x = {}: error {:e} after {:e} (C = {c})", r.x, w[1], w[0]));
            }
        }
    }
    Ok(())
}

pub fn invariants(report: &RunReport, cfg: &FpiConfig) -> Check {
    bracketing(report, cfg.tol_z)?;
    interlacing(report)?;
    quadratic(report, cfg)
}

/// Same count and pairwise relative agreement.
pub fn matches(found: &[f64], want: &[f64], rel: f64) -> Check {
    if found.len() != want.len() {
        return Err(format!("{} zeros, expected {}", found.len(), want.len()));
    }
    for (g, w) in found.iter().zip(want) {
        if (g - w).abs() > rel * w.abs() {
            return Err(format!("{g} vs {w}: relative error {:e}", (g - w).abs() / w.abs()));
        }
    }
    Ok(())
}

pub fn with_max_iter(max_iter_per_zero: usize) -> FindOptions {
    FindOptions { fpi: FpiConfig { max_iter_per_zero, ..Default::default() }, ..Default::default() }
}

pub fn with_dde(dir: DdeDirection, max_iter_per_zero: usize) -> FindOptions {
    FindOptions { dde: Some(dir), ..with_max_iter(max_iter_per_zero) }
}
