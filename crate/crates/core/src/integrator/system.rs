use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::kinetics::{fd_jacobian, KineticsError};

/// Failure to evaluate the right-hand side or Jacobian at a state.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct SystemError {
    /// Offending state component, when known.
    pub index: Option<usize>,
    pub message: String,
}

impl SystemError {
    pub fn new(message: impl Into<String>) -> Self {
        SystemError { index: None, message: message.into() }
    }
}

impl From<KineticsError> for SystemError {
    fn from(e: KineticsError) -> Self {
        let index = match &e {
            KineticsError::InvalidState { index, .. } | KineticsError::NonFinite { index } => Some(*index),
            _ => None,
        };
        SystemError { index, message: e.to_string() }
    }
}

/// Autonomous system `dy/dt = F(y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, y: &[f64], dydt: &mut [f64]) -> Result<(), SystemError>;

    /// Dense Jacobian; central differences with unit typical scales unless overridden.
    fn jacobian(&self, y: &[f64]) -> Result<DMatrix<f64>, SystemError> {
        let typical = vec![1.0; y.len()];
        fd_jacobian(|y: &[f64], out: &mut [f64]| self.rhs(y, out), y, &typical)
    }

    /// Rejects states the system cannot be evaluated at. Candidate steps that fail this are rejected.
    fn check_state(&self, _y: &[f64]) -> Result<(), SystemError> {
        Ok(())
    }
}

/// `F(y) = M y`, with its exact Jacobian.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "linear system matrix must be square");
        LinearSystem { matrix }
    }
}

impl OdeSystem for LinearSystem {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn rhs(&self, y: &[f64], dydt: &mut [f64]) -> Result<(), SystemError> {
        let v = &self.matrix * DVector::from_column_slice(y);
        dydt.copy_from_slice(v.as_slice());
        Ok(())
    }

    fn jacobian(&self, _y: &[f64]) -> Result<DMatrix<f64>, SystemError> {
        Ok(self.matrix.clone())
    }
}

/// System defined by a closure, Jacobian by finite differences.
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, y: &[f64], dydt: &mut [f64]) -> Result<(), SystemError> {
        (self.f)(y, dydt);
        if let Some(i) = dydt.iter().position(|v| !v.is_finite()) {
            return Err(SystemError { index: Some(i), message: format!("non-finite derivative at {i}") });
        }
        Ok(())
    }
}
