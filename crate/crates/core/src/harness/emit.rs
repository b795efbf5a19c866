use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::config::OutputFormat;
use super::record::ExperimentRecord;
use super::{HarnessError, HarnessResult};

pub const CSV_HEADER: &str = "model,n,p,sigma2,replicate,estimator,loss_vector,loss_matrix,loss_z2,objective,iterations,fixed_point_residual,converged,exact_recovery,benchmark_vector,benchmark_matrix,benchmark_exp,wall_time_ms,master_seed";

enum Cell {
    Text(String),
    Int(u64),
    Float(Option<f64>),
    Bool(Option<bool>),
}

/// 17 significant digits, enough to round-trip any f64.
fn float_text(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

fn cells(r: &ExperimentRecord) -> [Cell; 19] {
    use Cell::*;
    [
        Text(r.model.to_string()),
        Int(r.n as u64),
        Float(Some(r.p)),
        Float(Some(r.sigma2)),
        Int(r.replicate),
        Text(r.estimator.to_string()),
        Float(r.loss_vector),
        Float(r.loss_matrix),
        Float(r.loss_z2),
        Float(r.objective),
        Int(r.iterations),
        Float(r.fixed_point_residual),
        Bool(Some(r.converged)),
        Bool(r.exact_recovery),
        Float(r.benchmark_vector),
        Float(r.benchmark_matrix),
        Float(r.benchmark_exp),
        Float(r.wall_time_ms),
        Int(r.master_seed),
    ]
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => x.and_then(float_text).unwrap_or_default(),
        Cell::Bool(b) => b.map(|b| b.to_string()).unwrap_or_default(),
    }
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Text(s) => format!("\"{s}\""),
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => x.and_then(float_text).unwrap_or_else(|| "null".into()),
        Cell::Bool(b) => b.map(|b| b.to_string()).unwrap_or_else(|| "null".into()),
    }
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let row: Vec<String> = cells(r).iter().map(csv_cell).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

pub fn write_jsonl<W: Write>(records: &[ExperimentRecord], mut out: W) -> std::io::Result<()> {
    let names: Vec<&str> = CSV_HEADER.split(',').collect();
    for r in records {
        let fields: Vec<String> = names
            .iter()
            .zip(cells(r).iter())
            .map(|(name, c)| format!("\"{name}\":{}", json_cell(c)))
            .collect();
        writeln!(out, "{{{}}}", fields.join(","))?;
    }
    out.flush()
}

/// Writes `records` to `path`. An empty record list is an error.
pub fn emit(records: &[ExperimentRecord], format: OutputFormat, path: &Path) -> HarnessResult<()> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to write".into()));
    }
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Jsonl => write_jsonl(records, out),
    }
    .map_err(io_err)
}

pub fn read_csv(path: &Path) -> HarnessResult<Vec<ExperimentRecord>> {
    let parse_err = |e: csv::Error| HarnessError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::Reader::from_path(path).map_err(parse_err)?;
    let header = reader
        .headers()
        .map_err(parse_err)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("unexpected header {header:?}"),
        });
    }
    reader
        .deserialize()
        .collect::<Result<Vec<ExperimentRecord>, _>>()
        .map_err(parse_err)
}

pub fn read_jsonl(path: &Path) -> HarnessResult<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", i + 1),
        })?;
        out.push(rec);
    }
    Ok(out)
}
