//! `phi`-function evaluation: scalar functions, a dense augmented-matrix
//! route, and the adaptive Krylov evaluator used by the integrator.

mod arnoldi;
mod dense;
mod expm;
mod kiops;
mod scalar;

use thiserror::Error;

pub use arnoldi::{arnoldi, Arnoldi, ArnoldiResult, LinearOperator};
pub use dense::{augmented_matrix, dense_phi_oracle, DENSE_ORACLE_MAX};
pub use expm::{expm, norm1, squaring_count, THETA_13};
pub use kiops::{kiops_eval, KiopsOptions, KiopsStats, PhiRequest, PhiResult, MAX_PHI_ORDER};
pub use scalar::{phi_scalar, phi_scalars};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhiError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("time points must be strictly increasing in (0, 1] and end at 1, got {0:?}")]
    InvalidTimePoints(Vec<f64>),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("non-finite value in matrix exponential input or output")]
    NonFinite,
    #[error("Krylov start vector is zero")]
    ZeroVector,
    #[error("Padé denominator is singular")]
    SingularPade,
    #[error(
        "Krylov evaluation did not converge at tau = {time}: substep {substep:e}, m = {krylov_dim}, error {error:e} > {target:e}"
    )]
    ConvergenceFailure {
        time: f64,
        substep: f64,
        krylov_dim: usize,
        error: f64,
        target: f64,
        stats: KiopsStats,
    },
}
