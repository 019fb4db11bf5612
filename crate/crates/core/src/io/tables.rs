//! CSV output schemas.

use std::io::{Read, Write};

use thiserror::Error;

use super::lexer::format_f64;
use crate::diagnostics::SpectrumStats;
use crate::integrator::StepRecord;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { expected: Vec<String>, found: Vec<String> },
    #[error("row {row}, column '{column}': cannot parse '{value}'")]
    Field { row: usize, column: String, value: String },
}

/// A record type with a fixed CSV header.
pub trait CsvRow: Sized {
    const HEADER: &'static [&'static str];
    fn to_fields(&self) -> Vec<String>;
    /// Parses one row; `Err` carries the failing column index.
    fn from_fields(fields: &[&str]) -> Result<Self, usize>;
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

fn num(s: &str) -> Option<f64> {
    s.parse().ok()
}

fn opt_num(s: &str) -> Option<Option<f64>> {
    if s.is_empty() {
        Some(None)
    } else {
        num(s).map(Some)
    }
}

/// One line of `steps.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRow {
    pub t: f64,
    pub h: f64,
    pub accepted: bool,
    pub err_est: f64,
    pub krylov_dim: usize,
    pub substeps: usize,
    pub cpu_ns: u64,
}

impl From<&StepRecord> for StepRow {
    fn from(r: &StepRecord) -> Self {
        StepRow {
            t: r.t,
            h: r.h,
            accepted: r.accepted,
            err_est: r.err_scaled,
            krylov_dim: r.krylov_dim(),
            substeps: r.substeps(),
            cpu_ns: (r.cpu_seconds * 1e9).round() as u64,
        }
    }
}

impl CsvRow for StepRow {
    const HEADER: &'static [&'static str] = &["t", "h", "accepted", "err_est", "krylov_dim", "substeps", "cpu_ns"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            format_f64(self.t),
            format_f64(self.h),
            u8::from(self.accepted).to_string(),
            format_f64(self.err_est),
            self.krylov_dim.to_string(),
            self.substeps.to_string(),
            self.cpu_ns.to_string(),
        ]
    }

    fn from_fields(f: &[&str]) -> Result<Self, usize> {
        Ok(StepRow {
            t: num(f[0]).ok_or(0usize)?,
            h: num(f[1]).ok_or(1usize)?,
            accepted: match f[2] {
                "1" => true,
                "0" => false,
                _ => return Err(2usize),
            },
            err_est: num(f[3]).ok_or(3usize)?,
            krylov_dim: f[4].parse().map_err(|_| 4usize)?,
            substeps: f[5].parse().map_err(|_| 5usize)?,
            cpu_ns: f[6].parse().map_err(|_| 6usize)?,
        })
    }
}

/// One line of `sweep.csv`. Error columns are empty for failed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub atol: f64,
    pub rtol: f64,
    /// Integration-only wall time.
    pub cpu_s: f64,
    /// `||y - y_ref||_2` over `[T, Y...]` at `t_final`.
    pub err_2norm: Option<f64>,
    /// RMS of `(y - y_ref) / (atol + rtol |y_ref|)`.
    pub err_scaled: Option<f64>,
    /// `ok` or a failure message.
    pub status: String,
}

impl CsvRow for SweepRow {
    const HEADER: &'static [&'static str] = &["atol", "rtol", "cpu_s", "err_2norm", "err_scaled", "status"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            format_f64(self.atol),
            format_f64(self.rtol),
            format_f64(self.cpu_s),
            opt(self.err_2norm),
            opt(self.err_scaled),
            self.status.clone(),
        ]
    }

    fn from_fields(f: &[&str]) -> Result<Self, usize> {
        Ok(SweepRow {
            atol: num(f[0]).ok_or(0usize)?,
            rtol: num(f[1]).ok_or(1usize)?,
            cpu_s: num(f[2]).ok_or(2usize)?,
            err_2norm: opt_num(f[3]).ok_or(3usize)?,
            err_scaled: opt_num(f[4]).ok_or(4usize)?,
            status: f[5].to_string(),
        })
    }
}

/// One line of `spectrum.csv`. Spectrum columns are empty on decimated or failed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub t: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub norm_step_cost: f64,
    pub h: f64,
    pub max_real: Option<f64>,
    /// `ok`, `skipped` or a failure message.
    pub status: String,
}

impl SpectrumRow {
    pub fn with_stats(stats: &SpectrumStats, h: f64, norm_step_cost: f64) -> Self {
        SpectrumRow {
            t: stats.t,
            alpha: Some(stats.alpha),
            beta: Some(stats.beta),
            omega: Some(stats.omega),
            norm_step_cost,
            h,
            max_real: Some(stats.max_real),
            status: "ok".into(),
        }
    }

    pub fn cost_only(t: f64, h: f64, norm_step_cost: f64, status: impl Into<String>) -> Self {
        SpectrumRow { t, alpha: None, beta: None, omega: None, norm_step_cost, h, max_real: None, status: status.into() }
    }
}

impl CsvRow for SpectrumRow {
    const HEADER: &'static [&'static str] =
        &["t", "alpha", "beta", "omega", "norm_step_cost", "h", "max_real", "status"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            format_f64(self.t),
            opt(self.alpha),
            opt(self.beta),
            opt(self.omega),
            format_f64(self.norm_step_cost),
            format_f64(self.h),
            opt(self.max_real),
            self.status.clone(),
        ]
    }

    fn from_fields(f: &[&str]) -> Result<Self, usize> {
        Ok(SpectrumRow {
            t: num(f[0]).ok_or(0usize)?,
            alpha: opt_num(f[1]).ok_or(1usize)?,
            beta: opt_num(f[2]).ok_or(2usize)?,
            omega: opt_num(f[3]).ok_or(3usize)?,
            norm_step_cost: num(f[4]).ok_or(4usize)?,
            h: num(f[5]).ok_or(5usize)?,
            max_real: opt_num(f[6]).ok_or(6usize)?,
            status: f[7].to_string(),
        })
    }
}

/// Writes a header and one line per row.
pub fn write_csv<T: CsvRow, W: Write>(out: W, rows: &[T]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::HEADER)?;
    for r in rows {
        w.write_record(r.to_fields())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn check_header(found: &csv::StringRecord, expected: &[String]) -> Result<(), CsvError> {
    let found: Vec<String> = found.iter().map(str::to_string).collect();
    if found != expected {
        return Err(CsvError::Header { expected: expected.to_vec(), found });
    }
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<T: CsvRow, R: Read>(input: R) -> Result<Vec<T>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let expected: Vec<String> = T::HEADER.iter().map(|s| s.to_string()).collect();
    check_header(r.headers()?, &expected)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let fields: Vec<&str> = rec.iter().collect();
        let row = T::from_fields(&fields).map_err(|c| CsvError::Field {
            row: i + 1,
            column: T::HEADER[c].to_string(),
            value: fields[c].to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// `solution.csv` header: `t`, `T`, then `Y_<name>` per species.
pub fn solution_header(species: &[&str]) -> Vec<String> {
    let mut h = vec!["t".to_string(), "T".to_string()];
    h.extend(species.iter().map(|s| format!("Y_{s}")));
    h
}

/// Writes `(t, [T, Y...])` rows.
pub fn write_solution<W: Write>(out: W, species: &[&str], rows: &[(f64, &[f64])]) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(solution_header(species))?;
    for (t, y) in rows {
        let mut rec = Vec::with_capacity(y.len() + 1);
        rec.push(format_f64(*t));
        rec.extend(y.iter().map(|v| format_f64(*v)));
        w.write_record(rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads `solution.csv` back as species names and `(t, [T, Y...])` rows.
#[allow(clippy::type_complexity)]
pub fn read_solution<R: Read>(input: R) -> Result<(Vec<String>, Vec<(f64, Vec<f64>)>), CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let species: Vec<String> = header.iter().skip(2).map(|s| s.trim_start_matches("Y_").to_string()).collect();
    let names: Vec<&str> = species.iter().map(String::as_str).collect();
    check_header(&header, &solution_header(&names))?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut vals = Vec::with_capacity(rec.len());
        for (c, f) in rec.iter().enumerate() {
            vals.push(num(f).ok_or_else(|| CsvError::Field {
                row: i + 1,
                column: header[c].to_string(),
                value: f.to_string(),
            })?);
        }
        let t = vals.remove(0);
        rows.push((t, vals));
    }
    Ok((species, rows))
}
