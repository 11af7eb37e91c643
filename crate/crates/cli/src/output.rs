use std::io::Write;

use hyperzero::ZeroRecord;
use serde::Serialize;

use crate::args::Format;

/// Scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct RecordRow {
    index: usize,
    x: f64,
    z: f64,
    iterations: usize,
    residual: f64,
    dde: Option<String>,
}

pub fn records(out: &mut impl Write, records: &[ZeroRecord], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "x", "z", "iterations", "residual", "dde"])?;
            for r in records {
                let dde = r.dde.map(|d| d.to_string()).unwrap_or_default();
                w.write_record([r.index.to_string(), num(r.x), num(r.z), r.iterations.to_string(), num(r.residual), dde])?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<RecordRow> = records
                .iter()
                .map(|r| RecordRow {
                    index: r.index,
                    x: r.x,
                    z: r.z,
                    iterations: r.iterations,
                    residual: r.residual,
                    dde: r.dde.map(|d| d.to_string()),
                })
                .collect();
            json(out, &rows)
        }
    }
}

/// One matched zero across the compared DDEs.
pub struct CompareRow {
    pub x: f64,
    pub iterations: Vec<usize>,
}

impl CompareRow {
    /// First DDE over second; counts of 0 and 1 both mean an immediate hit,
    /// so both are read as 1.
    pub fn ratio(&self) -> f64 {
        self.iterations[0].max(1) as f64 / self.iterations[1].max(1) as f64
    }
}

pub fn compare(out: &mut impl Write, rows: &[CompareRow], format: Format) -> std::io::Result<()> {
    let n = rows.first().map_or(2, |r| r.iterations.len());
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["zero_index".to_string(), "x".to_string()];
            header.extend((1..=n).map(|i| format!("iters_dde{i}")));
            header.push("ratio".into());
            w.write_record(&header)?;
            for (i, r) in rows.iter().enumerate() {
                let mut rec = vec![i.to_string(), num(r.x)];
                rec.extend(r.iterations.iter().map(|v| v.to_string()));
                rec.push(num(r.ratio()));
                w.write_record(&rec)?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut m = serde_json::Map::new();
                    m.insert("zero_index".into(), i.into());
                    m.insert("x".into(), r.x.into());
                    for (k, v) in r.iterations.iter().enumerate() {
                        m.insert(format!("iters_dde{}", k + 1), (*v).into());
                    }
                    m.insert("ratio".into(), r.ratio().into());
                    m.into()
                })
                .collect();
            json(out, &rows)
        }
    }
}

#[derive(Serialize)]
struct OracleRow {
    index: usize,
    x: f64,
}

pub fn zeros(out: &mut impl Write, zeros: &[f64], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "x"])?;
            for (i, x) in zeros.iter().enumerate() {
                w.write_record([i.to_string(), num(*x)])?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<OracleRow> = zeros.iter().enumerate().map(|(index, &x)| OracleRow { index, x }).collect();
            json(out, &rows)
        }
    }
}

fn json(out: &mut impl Write, rows: &impl Serialize) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    writeln!(out)
}
