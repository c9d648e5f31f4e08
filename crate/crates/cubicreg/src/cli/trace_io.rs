//! Trace persistence: a fixed-column CSV for per-iterate records, an
//! optional sidecar CSV for full iterate vectors, and atomic file writes.
//!
//! Column order is fixed as
//! `k,f,f_gap,grad_norm,lambda_min,step_norm,mu,model_decrease,cum_path_length,dist_omega`
//! with absent quantities written as empty fields. Floats are serialized in
//! shortest-round-trip scientific notation, so parse → write reproduces the
//! bytes exactly.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::optimizer::{Algorithm, ConfigSnapshot, IterateRecord, Termination, Trace};

pub const TRACE_HEADER: &str =
    "k,f,f_gap,grad_norm,lambda_min,step_norm,mu,model_decrease,cum_path_length,dist_omega";

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("failed to read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("failed to write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount { line: usize, expected: usize, got: usize },
    #[error("line {line}, field '{field}': cannot parse '{text}'")]
    BadField { line: usize, field: &'static str, text: String },
    #[error("missing or wrong header; expected '{TRACE_HEADER}'")]
    BadHeader,
    #[error("trace is empty")]
    Empty,
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub f: f64,
    pub f_gap: Option<f64>,
    pub grad_norm: f64,
    pub lambda_min: f64,
    pub step_norm: f64,
    pub mu: f64,
    pub model_decrease: Option<f64>,
    pub cum_path_length: f64,
    pub dist_omega: Option<f64>,
}

/// Shortest-round-trip float formatting used in every CSV field.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Renders a trace to CSV text.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    let mut cum = 0.0f64;
    for rec in &trace.records {
        cum += rec.step_norm;
        let f_gap = trace.f_star.map(|fs| rec.f - fs);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            rec.k,
            fmt_f64(rec.f),
            fmt_opt(f_gap),
            fmt_f64(rec.grad_norm),
            fmt_f64(rec.lambda_min),
            fmt_f64(rec.step_norm),
            fmt_f64(rec.mu),
            fmt_opt(rec.model_decrease),
            fmt_f64(cum),
            fmt_opt(rec.dist_omega),
        ));
    }
    out
}

fn parse_field(line: usize, field: &'static str, text: &str) -> Result<f64, TraceIoError> {
    text.parse::<f64>().map_err(|_| TraceIoError::BadField { line, field, text: text.to_string() })
}

fn parse_opt(line: usize, field: &'static str, text: &str) -> Result<Option<f64>, TraceIoError> {
    if text.is_empty() {
        Ok(None)
    } else {
        parse_field(line, field, text).map(Some)
    }
}

/// Parses trace CSV text into rows.
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, TraceIoError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        _ => return Err(TraceIoError::BadHeader),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(TraceIoError::FieldCount { line: lineno, expected: 10, got: fields.len() });
        }
        rows.push(TraceRow {
            k: fields[0].parse::<usize>().map_err(|_| TraceIoError::BadField {
                line: lineno,
                field: "k",
                text: fields[0].to_string(),
            })?,
            f: parse_field(lineno, "f", fields[1])?,
            f_gap: parse_opt(lineno, "f_gap", fields[2])?,
            grad_norm: parse_field(lineno, "grad_norm", fields[3])?,
            lambda_min: parse_field(lineno, "lambda_min", fields[4])?,
            step_norm: parse_field(lineno, "step_norm", fields[5])?,
            mu: parse_field(lineno, "mu", fields[6])?,
            model_decrease: parse_opt(lineno, "model_decrease", fields[7])?,
            cum_path_length: parse_field(lineno, "cum_path_length", fields[8])?,
            dist_omega: parse_opt(lineno, "dist_omega", fields[9])?,
        });
    }
    if rows.is_empty() {
        return Err(TraceIoError::Empty);
    }
    Ok(rows)
}

/// Renders parsed rows back to CSV text; inverse of [`parse_trace_csv`].
pub fn rows_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.k,
            fmt_f64(r.f),
            fmt_opt(r.f_gap),
            fmt_f64(r.grad_norm),
            fmt_f64(r.lambda_min),
            fmt_f64(r.step_norm),
            fmt_f64(r.mu),
            fmt_opt(r.model_decrease),
            fmt_f64(r.cum_path_length),
            fmt_opt(r.dist_omega),
        ));
    }
    out
}

/// Rebuilds an analyzable [`Trace`] from parsed rows (and optional sidecar
/// iterates). The original run configuration is not stored in the CSV; the
/// caller supplies the algorithm kind and whatever constants it knows.
pub fn rows_to_trace(
    rows: &[TraceRow],
    algorithm: Algorithm,
    iterates: Option<Vec<Vec<f64>>>,
) -> Trace {
    let f_star = rows.iter().find_map(|r| r.f_gap.map(|g| r.f - g));
    let records: Vec<IterateRecord> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| IterateRecord {
            k: r.k,
            f: r.f,
            grad_norm: r.grad_norm,
            lambda_min: r.lambda_min,
            step_norm: r.step_norm,
            mu: r.mu,
            model_decrease: r.model_decrease,
            dist_omega: r.dist_omega,
            x: iterates.as_ref().and_then(|xs| xs.get(i).cloned()),
        })
        .collect();
    Trace {
        records,
        objective_name: String::new(),
        algorithm,
        config: ConfigSnapshot {
            algorithm,
            m: f64::NAN,
            l_bound: f64::NAN,
            step_size: None,
            mu_tol: None,
            grad_tol: None,
            max_iter: 0,
            c1: None,
            c2: None,
            seed: None,
            retry_shrink: None,
        },
        termination: Termination::MaxIter,
        f_star,
        inexact: None,
    }
}

/// Sidecar with one comma-separated iterate vector per row.
pub fn iterates_to_csv(trace: &Trace) -> Option<String> {
    let mut out = String::new();
    for rec in &trace.records {
        let x = rec.x.as_ref()?;
        let row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Some(out)
}

pub fn parse_iterates_csv(text: &str) -> Result<Vec<Vec<f64>>, TraceIoError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            row.push(parse_field(i + 1, "x", field)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes `contents` to `path` via a temp file in the same directory plus a
/// rename, so a partially written file never appears under the final name.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), TraceIoError> {
    let display = path.display().to_string();
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|source| TraceIoError::Write {
        path: tmp.display().to_string(),
        source,
    })?;
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(source) => {
            let _ = fs::remove_file(&tmp);
            Err(TraceIoError::Write { path: display, source })
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String, TraceIoError> {
    fs::read_to_string(path)
        .map_err(|source| TraceIoError::Read { path: path.display().to_string(), source })
}
