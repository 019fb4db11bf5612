//! Single exponential steps for a frozen `F(y_n)` and `J(y_n)`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::system::{OdeSystem, SystemError};
use crate::phi::{kiops_eval, KiopsOptions, KiopsStats, PhiError, PhiRequest};

/// Krylov tolerance and adaptation settings for the per-step `phi` evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSettings {
    pub tol: f64,
    pub options: KiopsOptions,
}

impl Default for PhiSettings {
    fn default() -> Self {
        PhiSettings { tol: 1e-12, options: KiopsOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    /// Failure inside Krylov call `call` (1 or 2).
    #[error("Krylov call {call}: {source}")]
    Phi { call: usize, source: PhiError },
    #[error("stage evaluation failed: {0}")]
    System(#[from] SystemError),
}

impl StepError {
    /// Krylov calls made by the failed attempt.
    pub fn kiops_calls(&self) -> usize {
        match self {
            StepError::Phi { call, .. } => *call,
            StepError::System(_) => 1,
        }
    }
}

/// Frozen data at the start of a step.
#[derive(Debug, Clone, Copy)]
pub struct StepInput<'a> {
    pub y: &'a [f64],
    pub f: &'a [f64],
    pub jac: &'a DMatrix<f64>,
    pub h: f64,
}

/// Result of one three-stage step.
#[derive(Debug, Clone)]
pub struct Epi3vStep {
    pub y_next: DVector<f64>,
    /// `y_n + h phi_1(hJ) F`, the embedded first-order solution.
    pub exp_euler: DVector<f64>,
    /// `y_next - exp_euler`.
    pub lte: DVector<f64>,
    /// Internal stage `Y_1`.
    pub stage: DVector<f64>,
    /// Work of the two Krylov calls, in call order.
    pub kiops: [KiopsStats; 2],
}

struct FirstCall {
    scaled_jac: DMatrix<f64>,
    /// `phi_1(3/4 hJ) hF`.
    phi1_quarter: DVector<f64>,
    /// `phi_1(hJ) hF`.
    phi1_full: DVector<f64>,
    stats: KiopsStats,
}

fn first_call(input: &StepInput<'_>, phi: &PhiSettings) -> Result<FirstCall, StepError> {
    let n = input.y.len();
    let scaled_jac = input.jac * input.h;
    let hf = DVector::from_iterator(n, input.f.iter().map(|v| v * input.h));
    let vectors = [DVector::zeros(n), hf];
    let times = [0.75, 1.0];
    let res = kiops_eval(
        &PhiRequest { matrix: &scaled_jac, vectors: &vectors, time_points: &times, tol: phi.tol },
        &phi.options,
    )
    .map_err(|source| StepError::Phi { call: 1, source })?;
    let mut values = res.values.into_iter();
    let w_quarter = values.next().expect("two outputs");
    let phi1_full = values.next().expect("two outputs");
    Ok(FirstCall { scaled_jac, phi1_quarter: w_quarter / 0.75, phi1_full, stats: res.stats })
}

/// One step of the three-stage exponential scheme, using exactly two Krylov calls.
pub fn epi3v_step<S: OdeSystem + ?Sized>(
    system: &S,
    input: &StepInput<'_>,
    phi: &PhiSettings,
) -> Result<Epi3vStep, StepError> {
    let n = input.y.len();
    let y = DVector::from_column_slice(input.y);
    let first = first_call(input, phi)?;
    let stage = &y + &first.phi1_quarter;

    let mut f_stage = vec![0.0; n];
    system.rhs(stage.as_slice(), &mut f_stage)?;
    // R(Y1) = f(Y1) - F - J (Y1 - y_n)
    let jd = input.jac * &first.phi1_quarter;
    let two_h_r = DVector::from_iterator(
        n,
        (0..n).map(|i| 2.0 * input.h * (f_stage[i] - input.f[i] - jd[i])),
    );

    // A zero remainder (linear F) is still a valid request: the augmented
    // start vector is nonzero and the Krylov space closes after a few products.
    let vectors = [DVector::zeros(n), DVector::zeros(n), DVector::zeros(n), two_h_r];
    let res = kiops_eval(
        &PhiRequest { matrix: &first.scaled_jac, vectors: &vectors, time_points: &[1.0], tol: phi.tol },
        &phi.options,
    )
    .map_err(|source| StepError::Phi { call: 2, source })?;
    let lte = res.values.into_iter().next().expect("one output");
    let second = res.stats;
    let exp_euler = &y + &first.phi1_full;
    let y_next = &exp_euler + &lte;
    Ok(Epi3vStep { y_next, exp_euler, lte, stage, kiops: [first.stats, second] })
}

/// Exponential Euler `y_n + h phi_1(hJ) F`, sharing the first Krylov call of [`epi3v_step`].
pub fn exp_euler_step(input: &StepInput<'_>, phi: &PhiSettings) -> Result<(DVector<f64>, KiopsStats), StepError> {
    let first = first_call(input, phi)?;
    let y = DVector::from_column_slice(input.y);
    Ok((y + first.phi1_full, first.stats))
}
