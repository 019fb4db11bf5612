//! Run, sweep and spectrum drivers behind the command-line tool.
//!
//! Timing for sweeps covers `integrate_adaptive` only: mechanism parsing,
//! reference generation and CSV writing are outside the measured window.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::diagnostics::{eigenvalues_dense, normalized_step_cost, spectrum_bounds};
use crate::integrator::{integrate_adaptive, ClampMode, OdeSystem, SolverError, SolverOutput, StepRecord};
use crate::io::{
    parse_config, parse_mechanism, write_csv, write_solution, CsvError, ParseError, RunConfig, SpectrumRow, StepRow,
    SweepPlan, SweepRow,
};
use crate::kinetics::{IsobaricReactor, Mechanism, ReverseRateConvention};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: CsvError },
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
}

impl HarnessError {
    /// Process exit code: 2 config/parse, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Config(_) => 2,
            HarnessError::Solver(_) => 3,
            HarnessError::Io { .. } | HarnessError::Csv { .. } => 4,
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Mechanism path, relative to the working directory.
    pub mechanism: Option<PathBuf>,
    pub clamp_mode: Option<ClampMode>,
    pub reverse_rate: Option<ReverseRateConvention>,
}

/// A parsed config together with its mechanism and initial state.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: RunConfig,
    pub mechanism: Mechanism,
    pub mechanism_path: PathBuf,
    /// `[T, Y_1..Y_K]` at `t = 0`.
    pub initial: Vec<f64>,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

impl Job {
    /// Loads the config at `path`, resolving the mechanism relative to the config's directory.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Job, HarnessError> {
        let text = read(path)?;
        let mut config = parse_config(&text).map_err(|source| HarnessError::Parse { path: path.to_path_buf(), source })?;
        let mechanism_path = match &overrides.mechanism {
            Some(p) => p.clone(),
            None => path.parent().unwrap_or(Path::new(".")).join(&config.mechanism),
        };
        if let Some(m) = overrides.clamp_mode {
            config.controller.clamp_mode = m;
        }
        if let Some(r) = overrides.reverse_rate {
            config.reverse_rate = r;
        }
        let mech_text = read(&mechanism_path)?;
        let mechanism =
            parse_mechanism(&mech_text).map_err(|source| HarnessError::Parse { path: mechanism_path.clone(), source })?;
        Job::new(config, mechanism, mechanism_path)
    }

    pub fn new(config: RunConfig, mechanism: Mechanism, mechanism_path: PathBuf) -> Result<Job, HarnessError> {
        let initial = config.initial_state(&mechanism).map_err(HarnessError::Config)?;
        let reactor = IsobaricReactor::new(&mechanism, config.pressure, config.reverse_rate);
        reactor
            .check_state(&initial)
            .map_err(|e| HarnessError::Config(format!("initial state: {e}")))?;
        Ok(Job { config, mechanism, mechanism_path, initial })
    }

    pub fn reactor(&self) -> IsobaricReactor<'_> {
        IsobaricReactor::new(&self.mechanism, self.config.pressure, self.config.reverse_rate)
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.mechanism.species().iter().map(|s| s.name.as_str()).collect()
    }

    /// Integrates with the config's tolerances.
    pub fn integrate(&self) -> Result<SolverOutput, SolverError> {
        self.integrate_with(self.config.controller.atol, self.config.controller.rtol)
    }

    /// Integrates with the given tolerances; everything else from the config.
    pub fn integrate_with(&self, atol: f64, rtol: f64) -> Result<SolverOutput, SolverError> {
        let mut opts = self.config.solver_options();
        opts.controller.atol = atol;
        opts.controller.rtol = rtol;
        integrate_adaptive(&self.reactor(), &self.initial, 0.0, self.config.t_final, &opts)
    }
}

fn create(dir: &Path, name: &str) -> Result<(fs::File, PathBuf), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok((file, path))
}

fn csv_err(path: PathBuf) -> impl FnOnce(CsvError) -> HarnessError {
    move |source| HarnessError::Csv { path, source }
}

/// Rows of `solution.csv`: the requested samples, or every accepted state.
pub fn solution_rows(output: &SolverOutput, sampled: bool) -> Vec<(f64, &[f64])> {
    let src = if sampled { &output.samples } else { &output.trajectory };
    src.iter().map(|(t, y)| (*t, y.as_slice())).collect()
}

fn write_run_files(job: &Job, output: &SolverOutput, out_dir: &Path) -> Result<(), HarnessError> {
    let (file, path) = create(out_dir, "solution.csv")?;
    let rows = solution_rows(output, job.config.output.samples > 0);
    write_solution(file, &job.species_names(), &rows).map_err(csv_err(path))?;
    let (file, path) = create(out_dir, "steps.csv")?;
    let steps: Vec<StepRow> = output.records.iter().map(StepRow::from).collect();
    write_csv(file, &steps).map_err(csv_err(path))
}

/// Single run writing `solution.csv` and `steps.csv`. On solver failure the
/// partial output is still written before the error is returned.
pub fn cmd_run(job: &Job, out_dir: &Path) -> Result<SolverOutput, HarnessError> {
    match job.integrate() {
        Ok(out) => {
            write_run_files(job, &out, out_dir)?;
            Ok(out)
        }
        Err(e) => {
            if let Some(partial) = e.partial() {
                write_run_files(job, partial, out_dir)?;
            }
            Err(e.into())
        }
    }
}

fn sweep_point(job: &Job, reference: &[f64], atol: f64, rtol: f64) -> SweepRow {
    let start = Instant::now();
    let result = job.integrate_with(atol, rtol);
    let cpu_s = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            let y = out.y.as_slice();
            let err_2norm = y.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let err_scaled = (y
                .iter()
                .zip(reference)
                .map(|(a, b)| ((a - b) / (atol + rtol * b.abs())).powi(2))
                .sum::<f64>()
                / y.len() as f64)
                .sqrt();
            SweepRow { atol, rtol, cpu_s, err_2norm: Some(err_2norm), err_scaled: Some(err_scaled), status: "ok".into() }
        }
        Err(e) => SweepRow { atol, rtol, cpu_s, err_2norm: None, err_scaled: None, status: format!("failed: {e}") },
    }
}

/// Reference run followed by one run per sweep point, rows in plan order.
/// A failed point yields a row with status `failed: ...`; a failed reference is an error.
pub fn sweep_rows(job: &Job, plan: &SweepPlan, parallel: bool) -> Result<Vec<SweepRow>, HarnessError> {
    plan.validate().map_err(HarnessError::Config)?;
    let (ra, rr) = plan.reference;
    let reference = job.integrate_with(ra, rr)?;
    let reference = reference.y.as_slice();
    if !parallel {
        return Ok(plan.points.iter().map(|&(a, r)| sweep_point(job, reference, a, r)).collect());
    }
    Ok(std::thread::scope(|s| {
        let handles: Vec<_> = plan.points.iter().map(|&(a, r)| s.spawn(move || sweep_point(job, reference, a, r))).collect();
        handles
            .into_iter()
            .zip(&plan.points)
            .map(|(h, &(atol, rtol))| {
                h.join().unwrap_or_else(|_| SweepRow {
                    atol,
                    rtol,
                    cpu_s: 0.0,
                    err_2norm: None,
                    err_scaled: None,
                    status: "failed: worker panicked".into(),
                })
            })
            .collect()
    }))
}

/// Writes `sweep.csv` for the config's sweep plan.
pub fn cmd_sweep(job: &Job, parallel: bool, out_dir: &Path) -> Result<Vec<SweepRow>, HarnessError> {
    let plan = job.config.sweep.as_ref().ok_or_else(|| HarnessError::Config("config has no [sweep] section".into()))?;
    let rows = sweep_rows(job, plan, parallel)?;
    let (file, path) = create(out_dir, "sweep.csv")?;
    write_csv(file, &rows).map_err(csv_err(path))?;
    Ok(rows)
}

/// Accepted step records, in order, with CPU time of any rejected
/// attempts at the same start folded into the record.
pub fn accepted_steps(records: &[StepRecord]) -> Vec<StepRecord> {
    let mut out = Vec::new();
    let mut pending = 0.0;
    for r in records {
        pending += r.cpu_seconds;
        if r.accepted {
            out.push(StepRecord { cpu_seconds: pending, ..*r });
            pending = 0.0;
        }
    }
    out
}

/// One row per accepted step; spectra at every `every`-th accepted step (the first included).
pub fn spectrum_rows(job: &Job, output: &SolverOutput, every: usize) -> Vec<SpectrumRow> {
    let every = every.max(1);
    let reactor = job.reactor();
    accepted_steps(&output.records)
        .iter()
        .enumerate()
        .map(|(k, rec)| {
            let cost = normalized_step_cost(rec);
            if k % every != 0 {
                return SpectrumRow::cost_only(rec.t, rec.h, cost, "skipped");
            }
            let y = output.trajectory[k].1.as_slice();
            let eigs = reactor
                .jacobian(y)
                .map_err(|e| e.to_string())
                .and_then(|j| eigenvalues_dense(&j).map_err(|e| e.to_string()));
            match eigs {
                Ok(e) if !e.is_empty() => SpectrumRow::with_stats(&spectrum_bounds(rec.t, &e), rec.h, cost),
                Ok(_) => SpectrumRow::cost_only(rec.t, rec.h, cost, "failed: empty spectrum"),
                Err(m) => SpectrumRow::cost_only(rec.t, rec.h, cost, format!("failed: {m}")),
            }
        })
        .collect()
}

/// Integrates and writes `spectrum.csv`. Eigensolver failures mark rows; the run continues.
pub fn cmd_spectrum(job: &Job, every: usize, out_dir: &Path) -> Result<Vec<SpectrumRow>, HarnessError> {
    let output = job.integrate()?;
    let rows = spectrum_rows(job, &output, every);
    let (file, path) = create(out_dir, "spectrum.csv")?;
    write_csv(file, &rows).map_err(csv_err(path))?;
    Ok(rows)
}
