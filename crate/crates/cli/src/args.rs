use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperzero::{DdeDirection, Family, FunctionSpec};

#[derive(Debug, Parser)]
#[command(name = "hyperzero", version, about = "Real zeros of 0F1, 1F1, 2F1 and 2F0 by fixed-point iteration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find all zeros on an interval.
    Find(FindArgs),
    /// Per-zero iteration counts for two or more DDEs.
    Compare(CompareArgs),
    /// Zeros by brute-force sign scan and bisection.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// 0F1, 1F1, 2F1 or 2F0.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Comma separated key=value list, e.g. a=-50,c=1.
    #[arg(long)]
    pub params: String,
    /// Open interval lo,hi; inf and -inf are accepted. Defaults to (0,inf),
    /// or (0,1) for 2F1 and (-inf,0) for 2F0.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
    pub interval: Option<(f64, f64)>,
    /// Evaluate the function at -x.
    #[arg(long)]
    pub arg_negated: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IterArgs {
    /// Convergence tolerance on z, relative to max(1,|z|).
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Iteration cap per zero.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Force a DDE direction, e.g. 1,1 or 1,-1,0.
    #[arg(long, allow_hyphen_values = true)]
    pub dde: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub iter: IterArgs,
    /// DDE direction; give at least two.
    #[arg(long, allow_hyphen_values = true, required = true, num_args = 1)]
    pub dde: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of grid cells.
    #[arg(long, default_value_t = 20_000)]
    pub grid: usize,
}

pub fn parse_family(s: &str) -> Result<Family, String> {
    match s.to_ascii_uppercase().as_str() {
        "0F1" => Ok(Family::F01),
        "1F1" => Ok(Family::F11),
        "2F1" => Ok(Family::F21),
        "2F0" => Ok(Family::F20),
        _ => Err(format!("unknown family '{s}', expected 0F1, 1F1, 2F1 or 2F0")),
    }
}

fn parse_bound(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        t => t.parse::<f64>().map_err(|_| format!("bad interval bound '{s}'")),
    }
}

pub fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("interval '{s}' is not lo,hi"))?;
    let (lo, hi) = (parse_bound(lo)?, parse_bound(hi)?);
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("empty interval '{s}'"));
    }
    Ok((lo, hi))
}

/// Builds the function from `key=value` pairs, requiring exactly the keys
/// the family uses.
pub fn parse_spec(family: Family, params: &str, negated: bool) -> Result<FunctionSpec, String> {
    let (mut a, mut b, mut c) = (None, None, None);
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| format!("parameter '{pair}' is not key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("bad value in '{pair}'"))?;
        if !v.is_finite() {
            return Err(format!("parameter '{pair}' is not finite"));
        }
        let slot = match k.trim() {
            "a" => &mut a,
            "b" => &mut b,
            "c" => &mut c,
            other => return Err(format!("unknown parameter '{other}'")),
        };
        if slot.replace(v).is_some() {
            return Err(format!("parameter '{}' given twice", k.trim()));
        }
    }
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| format!("{family} needs parameter {name}"));
    let unused = |name: &str, v: Option<f64>| match v {
        Some(_) => Err(format!("{family} has no parameter {name}")),
        None => Ok(()),
    };
    let spec = match family {
        Family::F01 => {
            unused("a", a)?;
            unused("b", b)?;
            FunctionSpec::f01(need("c", c)?)
        }
        Family::F11 => {
            unused("b", b)?;
            FunctionSpec::f11(need("a", a)?, need("c", c)?)
        }
        Family::F21 => FunctionSpec::f21(need("a", a)?, need("b", b)?, need("c", c)?),
        Family::F20 => {
            unused("c", c)?;
            FunctionSpec::f20(need("a", a)?, need("b", b)?)
        }
    };
    Ok(FunctionSpec { negated, ..spec })
}

pub fn default_interval(family: Family) -> (f64, f64) {
    match family {
        Family::F21 => (0.0, 1.0),
        Family::F20 => (f64::NEG_INFINITY, 0.0),
        _ => (0.0, f64::INFINITY),
    }
}

pub fn parse_direction(family: Family, s: &str) -> Result<DdeDirection, String> {
    DdeDirection::parse(family, s).map_err(|e| e.to_string())
}
