//! Adaptive and fixed-step time integration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use thiserror::Error;

use super::controller::{controller_update, scaled_error_norm, ControllerConfig};
use super::step::{epi3v_step, exp_euler_step, PhiSettings, StepError, StepInput};
use super::system::{OdeSystem, SystemError};
use crate::phi::KiopsStats;

/// Which solution advances the state. Both use the same embedded error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Epi3v,
    ExpEuler,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epi3v" => Ok(Method::Epi3v),
            "exp_euler" => Ok(Method::ExpEuler),
            other => Err(format!("unknown method '{other}' (expected epi3v|exp_euler)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Epi3v => "epi3v",
            Method::ExpEuler => "exp_euler",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub controller: ControllerConfig,
    pub phi: PhiSettings,
    pub method: Method,
    pub max_steps: usize,
    /// Times at which to report linearly interpolated states.
    pub output_times: Vec<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            controller: ControllerConfig::default(),
            phi: PhiSettings::default(),
            method: Method::Epi3v,
            max_steps: 1_000_000,
            output_times: Vec::new(),
        }
    }
}

/// One attempted step, accepted or not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Time at the start of the attempt.
    pub t: f64,
    pub h: f64,
    pub accepted: bool,
    /// Infinite when the attempt produced no estimate.
    pub err_scaled: f64,
    pub kiops: [KiopsStats; 2],
    /// Krylov calls made by this attempt.
    pub kiops_calls: usize,
    /// Rejected attempts preceding this one at the same `t`.
    pub prior_rejections: usize,
    pub cpu_seconds: f64,
}

impl StepRecord {
    /// Total substeps `M` over both Krylov calls.
    pub fn substeps(&self) -> usize {
        self.kiops[0].substeps + self.kiops[1].substeps
    }

    /// Largest Krylov dimension over both calls.
    pub fn krylov_dim(&self) -> usize {
        self.kiops[0].krylov_dim.max(self.kiops[1].krylov_dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutput {
    /// Final time reached.
    pub t: f64,
    pub y: DVector<f64>,
    /// Accepted states including the initial one.
    pub trajectory: Vec<(f64, DVector<f64>)>,
    /// States at the requested output times that were reached.
    pub samples: Vec<(f64, DVector<f64>)>,
    pub records: Vec<StepRecord>,
}

impl SolverOutput {
    pub fn accepted_steps(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    pub fn rejected_steps(&self) -> usize {
        self.records.len() - self.accepted_steps()
    }

    pub fn total_cpu_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.cpu_seconds).sum()
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial state rejected: {0}")]
    InitialState(SystemError),
    #[error("evaluation failed at t = {t}: {source}")]
    System { t: f64, source: SystemError },
    #[error("step size {h:e} fell to h_min at t = {t}")]
    StepTooSmall { t: f64, h: f64, partial: Box<SolverOutput> },
    #[error("step limit {limit} reached at t = {t}")]
    TooManySteps { t: f64, limit: usize, partial: Box<SolverOutput> },
    #[error("fixed step failed at t = {t}: {source}")]
    Step { t: f64, source: StepError },
}

impl SolverError {
    /// Output accumulated before the failure, where available.
    pub fn partial(&self) -> Option<&SolverOutput> {
        match self {
            SolverError::StepTooSmall { partial, .. } | SolverError::TooManySteps { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

struct Attempt {
    y: DVector<f64>,
    err: f64,
    kiops: [KiopsStats; 2],
    calls: usize,
}

fn attempt_step<S: OdeSystem + ?Sized>(
    system: &S,
    input: &StepInput<'_>,
    opts: &SolverOptions,
) -> Result<Attempt, (StepError, usize)> {
    let cfg = &opts.controller;
    let step = epi3v_step(system, input, &opts.phi).map_err(|e| {
        let calls = e.kiops_calls();
        (e, calls)
    })?;
    let y = match opts.method {
        Method::Epi3v => step.y_next,
        Method::ExpEuler => step.exp_euler,
    };
    let err = scaled_error_norm(step.lte.as_slice(), input.y, cfg.atol, cfg.rtol);
    Ok(Attempt { y, err, kiops: step.kiops, calls: 2 })
}

/// Integrates from `t0` to `t_final` with error control. The last step is
/// truncated to land on `t_final`.
pub fn integrate_adaptive<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t0: f64,
    t_final: f64,
    opts: &SolverOptions,
) -> Result<SolverOutput, SolverError> {
    let cfg = &opts.controller;
    cfg.validate().map_err(SolverError::InvalidConfig)?;
    if !(t_final > t0) || !t0.is_finite() || !t_final.is_finite() {
        return Err(SolverError::InvalidConfig(format!("need finite t_final > t0 (got {t0}, {t_final})")));
    }
    if y0.len() != system.dim() {
        return Err(SolverError::InvalidConfig(format!("state length {} for dimension {}", y0.len(), system.dim())));
    }
    if let Some(bad) = opts.output_times.iter().find(|&&t| !(t >= t0 && t <= t_final)) {
        return Err(SolverError::InvalidConfig(format!("output time {bad} outside [{t0}, {t_final}]")));
    }
    system.check_state(y0).map_err(SolverError::InitialState)?;

    let n = y0.len();
    let mut out = SolverOutput {
        t: t0,
        y: DVector::from_column_slice(y0),
        trajectory: vec![(t0, DVector::from_column_slice(y0))],
        samples: Vec::new(),
        records: Vec::new(),
    };
    let mut outputs: Vec<f64> = opts.output_times.clone();
    outputs.sort_by(f64::total_cmp);
    let mut next_output = 0;
    while next_output < outputs.len() && outputs[next_output] <= t0 {
        out.samples.push((outputs[next_output], out.y.clone()));
        next_output += 1;
    }

    let mut h = cfg.h0.unwrap_or(1e-10 * (t_final - t0)).max(cfg.h_min);
    let mut f = vec![0.0; n];
    let mut accepted_count = 0usize;

    while out.t < t_final {
        if accepted_count >= opts.max_steps {
            let t = out.t;
            return Err(SolverError::TooManySteps { t, limit: opts.max_steps, partial: Box::new(out) });
        }
        let mut clock = Instant::now();
        let t = out.t;
        system.rhs(out.y.as_slice(), &mut f).map_err(|source| SolverError::System { t, source })?;
        let jac = system.jacobian(out.y.as_slice()).map_err(|source| SolverError::System { t, source })?;

        let mut rejections = 0;
        loop {
            let last = h >= t_final - t;
            let h_try = if last { t_final - t } else { h };
            let input = StepInput { y: out.y.as_slice(), f: &f, jac: &jac, h: h_try };
            let (candidate, err, kiops, calls, h_next) = match attempt_step(system, &input, opts) {
                Ok(a) if system.check_state(a.y.as_slice()).is_ok() => {
                    let (accept, h_new) = controller_update(a.err, h_try, cfg);
                    (accept.then_some(a.y), a.err, a.kiops, a.calls, h_new)
                }
                // An unphysical candidate is treated like a failed error test.
                Ok(a) => (None, f64::INFINITY, a.kiops, a.calls, (h_try * 0.5).max(cfg.h_min)),
                Err((_, calls)) => (None, f64::INFINITY, [KiopsStats::default(); 2], calls, (h_try * 0.5).max(cfg.h_min)),
            };
            let cpu_seconds = clock.elapsed().as_secs_f64();
            clock = Instant::now();
            out.records.push(StepRecord {
                t,
                h: h_try,
                accepted: candidate.is_some(),
                err_scaled: err,
                kiops,
                kiops_calls: calls,
                prior_rejections: rejections,
                cpu_seconds,
            });

            if let Some(y_new) = candidate {
                let t_new = if last { t_final } else { t + h_try };
                while next_output < outputs.len() && outputs[next_output] <= t_new {
                    let ts = outputs[next_output];
                    let theta = (ts - t) / (t_new - t);
                    out.samples.push((ts, &out.y * (1.0 - theta) + &y_new * theta));
                    next_output += 1;
                }
                out.t = t_new;
                out.y = y_new;
                out.trajectory.push((t_new, out.y.clone()));
                h = h_next;
                accepted_count += 1;
                break;
            }
            rejections += 1;
            if h_try <= cfg.h_min {
                return Err(SolverError::StepTooSmall { t, h: h_try, partial: Box::new(out) });
            }
            h = h_next.min(h_try * (1.0 - f64::EPSILON)).max(cfg.h_min);
        }
    }
    Ok(out)
}

/// `n_steps` equal steps of the three-stage scheme without error control.
pub fn integrate_fixed<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t0: f64,
    t_final: f64,
    n_steps: usize,
    phi: &PhiSettings,
) -> Result<DVector<f64>, SolverError> {
    if n_steps == 0 || !(t_final > t0) {
        return Err(SolverError::InvalidConfig(format!("need n_steps > 0 and t_final > t0 (got {n_steps})")));
    }
    let h = (t_final - t0) / n_steps as f64;
    let mut y = DVector::from_column_slice(y0);
    let mut f = vec![0.0; y0.len()];
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        system.rhs(y.as_slice(), &mut f).map_err(|source| SolverError::System { t, source })?;
        let jac = system.jacobian(y.as_slice()).map_err(|source| SolverError::System { t, source })?;
        let step = epi3v_step(system, &StepInput { y: y.as_slice(), f: &f, jac: &jac, h }, phi)
            .map_err(|source| SolverError::Step { t, source })?;
        y = step.y_next;
    }
    Ok(y)
}

/// `n_steps` equal exponential Euler steps.
pub fn integrate_fixed_exp_euler<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t0: f64,
    t_final: f64,
    n_steps: usize,
    phi: &PhiSettings,
) -> Result<DVector<f64>, SolverError> {
    if n_steps == 0 || !(t_final > t0) {
        return Err(SolverError::InvalidConfig(format!("need n_steps > 0 and t_final > t0 (got {n_steps})")));
    }
    let h = (t_final - t0) / n_steps as f64;
    let mut y = DVector::from_column_slice(y0);
    let mut f = vec![0.0; y0.len()];
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        system.rhs(y.as_slice(), &mut f).map_err(|source| SolverError::System { t, source })?;
        let jac = system.jacobian(y.as_slice()).map_err(|source| SolverError::System { t, source })?;
        let (next, _) = exp_euler_step(&StepInput { y: y.as_slice(), f: &f, jac: &jac, h }, phi)
            .map_err(|source| SolverError::Step { t, source })?;
        y = next;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{FnSystem, LinearSystem};
    use nalgebra::DMatrix;

    #[test]
    fn lands_exactly_on_t_final() {
        let sys = FnSystem::new(1, |y: &[f64], out: &mut [f64]| out[0] = -y[0] * y[0]);
        let opts = SolverOptions { output_times: vec![0.0, 0.5, 2.0], ..Default::default() };
        let out = integrate_adaptive(&sys, &[1.0], 0.0, 2.0, &opts).unwrap();
        assert_eq!(out.t, 2.0);
        assert_eq!(out.trajectory.last().unwrap().0, 2.0);
        assert!((out.y[0] - 1.0 / 3.0).abs() < 1e-6, "{}", out.y[0]);
        assert_eq!(out.samples.len(), 3);
        assert!((out.samples[1].1[0] - 1.0 / 1.5).abs() < 1e-3);
        for r in &out.records {
            assert_eq!(r.accepted, r.err_scaled <= 1.0);
            assert_eq!(r.kiops_calls, 2);
        }
    }

    #[test]
    fn linear_system_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[-100.0, 1.0, 0.0, -0.1]);
        let sys = LinearSystem::new(m.clone());
        let out = integrate_adaptive(&sys, &[1.0, 1.0], 0.0, 1.0, &SolverOptions::default()).unwrap();
        let exact = crate::phi::expm(&m).unwrap() * DVector::from_element(2, 1.0);
        assert!((out.y - exact).norm() < 1e-10);
    }

    #[test]
    fn invalid_interval() {
        let sys = LinearSystem::new(DMatrix::identity(1, 1));
        let r = integrate_adaptive(&sys, &[1.0], 1.0, 1.0, &SolverOptions::default());
        assert!(matches!(r, Err(SolverError::InvalidConfig(_))));
    }

    #[test]
    fn step_limit_returns_partial() {
        let sys = FnSystem::new(1, |y: &[f64], out: &mut [f64]| out[0] = -y[0] * y[0]);
        let opts = SolverOptions { max_steps: 3, ..Default::default() };
        match integrate_adaptive(&sys, &[1.0], 0.0, 100.0, &opts) {
            Err(e @ SolverError::TooManySteps { .. }) => assert_eq!(e.partial().unwrap().trajectory.len(), 4),
            other => panic!("{other:?}"),
        }
    }
}
