mod args;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use args::{default_interval, parse_direction, parse_spec, Cli, Command, CompareArgs, FindArgs, OracleArgs, ProblemArgs};
use clap::Parser;
use hyperzero::{brute_force_zeros, find, Error, FindOptions, FpiConfig, FunctionSpec, OracleConfig, RunReport};
use output::CompareRow;

/// Exit status for a library error: 2 bad input, 3 numerical failure,
/// 4 unsupported solution branch.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedSolutionBranch(_) => 4,
        Error::NoConvergence { .. }
        | Error::RecurrenceUnstable { .. }
        | Error::DomainExit { .. }
        | Error::GridTooCoarse { .. }
        | Error::MultipleZerosFound { .. } => 3,
        _ => 2,
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn problem(p: &ProblemArgs) -> Result<(FunctionSpec, (f64, f64)), Failure> {
    let spec = parse_spec(p.family, &p.params, p.arg_negated).map_err(Failure::Usage)?;
    Ok((spec, p.interval.unwrap_or_else(|| default_interval(p.family))))
}

fn fpi_config(tol: f64, max_iter: usize) -> Result<FpiConfig, Failure> {
    if !(tol > 0.0 && tol < 1.0) || max_iter == 0 {
        return Err(Failure::Usage("--tol must lie in (0,1) and --max-iter be positive".into()));
    }
    Ok(FpiConfig { tol_z: tol, max_iter_per_zero: max_iter, ..Default::default() })
}

fn warn(report: &RunReport) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.records.iter().any(|r| r.residual > 1e-8) {
        eprintln!("warning: some zeros have residual above 1e-8 (precision loss)");
    }
}

fn cmd_find(a: &FindArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (spec, interval) = problem(&a.problem)?;
    let dde = a.dde.as_deref().map(|s| parse_direction(spec.family, s)).transpose().map_err(Failure::Usage)?;
    let opts = FindOptions { fpi: fpi_config(a.iter.tol, a.iter.max_iter)?, dde, ..Default::default() };
    match find(&spec, interval, &opts) {
        Ok(report) => {
            warn(&report);
            output::records(out, &report.records, a.problem.format)?;
            Ok(())
        }
        Err(Error::NoConvergence { iterations, last_z, partial }) => {
            // zeros found before the failure are still worth printing
            output::records(out, &partial, a.problem.format)?;
            Err(Failure::Lib(Error::NoConvergence { iterations, last_z, partial: vec![] }))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_compare(a: &CompareArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (spec, interval) = problem(&a.problem)?;
    if a.dde.len() < 2 {
        return Err(Failure::Usage("compare needs at least two --dde".into()));
    }
    let dirs = a.dde.iter().map(|s| parse_direction(spec.family, s)).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)?;
    let fpi = fpi_config(a.iter.tol, a.iter.max_iter)?;
    let reports: Vec<Result<RunReport, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = dirs
            .iter()
            .map(|&d| s.spawn(move || find(&spec, interval, &FindOptions { fpi, dde: Some(d), ..Default::default() })))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).collect()
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        warn(r);
    }
    let mut rows = vec![];
    let mut unmatched = 0;
    for rec in &reports[0].records {
        let close = |y: f64| (y - rec.x).abs() <= 1e-8 * rec.x.abs().max(y.abs());
        let its: Option<Vec<usize>> = reports
            .iter()
            .map(|r| r.records.iter().find(|o| close(o.x)).map(|o| o.iterations))
            .collect();
        match its {
            Some(iterations) => rows.push(CompareRow { x: rec.x, iterations }),
            None => unmatched += 1,
        }
    }
    let others = reports[1..].iter().map(|r| r.records.len()).max().unwrap_or(0);
    if unmatched > 0 || others != reports[0].records.len() {
        eprintln!("warning: zero sets differ between DDEs; {unmatched} zeros of the first had no match");
    }
    output::compare(out, &rows, a.problem.format)?;
    Ok(())
}

fn cmd_oracle(a: &OracleArgs, out: &mut impl Write) -> Result<(), Failure> {
    let (spec, interval) = problem(&a.problem)?;
    let cfg = OracleConfig { grid_points: a.grid, ..Default::default() };
    let zeros = brute_force_zeros(&spec, interval, &cfg)?;
    output::zeros(out, &zeros, a.problem.format)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Find(a) => cmd_find(a, &mut out),
        Command::Compare(a) => cmd_compare(a, &mut out),
        Command::Oracle(a) => cmd_oracle(a, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
