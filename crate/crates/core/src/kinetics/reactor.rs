use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::DMatrix;

use super::{fd_jacobian, state::check_components, KineticsError, Mechanism, ReverseRateConvention, SourceEval};
use crate::integrator::{OdeSystem, SystemError};

/// Typical temperature scale for finite-difference perturbations, K.
const TYPICAL_TEMPERATURE: f64 = 1.0;
/// Typical mass-fraction scale for finite-difference perturbations.
const TYPICAL_MASS_FRACTION: f64 = 1e-6;

/// Constant-pressure reactor over a shared mechanism, exposed as an ODE system in `[T, Y...]`.
#[derive(Debug)]
pub struct IsobaricReactor<'m> {
    mech: &'m Mechanism,
    pressure: f64,
    convention: ReverseRateConvention,
    saturated: AtomicBool,
}

impl<'m> IsobaricReactor<'m> {
    pub fn new(mech: &'m Mechanism, pressure: f64, convention: ReverseRateConvention) -> Self {
        IsobaricReactor { mech, pressure, convention, saturated: AtomicBool::new(false) }
    }

    pub fn mechanism(&self) -> &'m Mechanism {
        self.mech
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    /// True once any evaluation clamped an exponent.
    pub fn saturated(&self) -> bool {
        self.saturated.load(Ordering::Relaxed)
    }

    pub fn eval_rhs(&self, y: &[f64], out: &mut [f64]) -> Result<(), KineticsError> {
        let mut ev = SourceEval::new(self.mech, self.pressure, self.convention);
        let res = ev.rhs(y, out);
        if ev.saturated {
            self.saturated.store(true, Ordering::Relaxed);
        }
        res
    }

    /// Central-difference Jacobian with typical scales 1 K and 1e-6.
    pub fn jacobian_fd(&self, y: &[f64]) -> Result<DMatrix<f64>, KineticsError> {
        let mut typical = vec![TYPICAL_MASS_FRACTION; y.len()];
        if let Some(t) = typical.first_mut() {
            *t = TYPICAL_TEMPERATURE;
        }
        fd_jacobian(|y: &[f64], out: &mut [f64]| self.eval_rhs(y, out), y, &typical)
    }
}

impl OdeSystem for IsobaricReactor<'_> {
    fn dim(&self) -> usize {
        self.mech.n_species() + 1
    }

    fn rhs(&self, y: &[f64], dydt: &mut [f64]) -> Result<(), SystemError> {
        Ok(self.eval_rhs(y, dydt)?)
    }

    fn jacobian(&self, y: &[f64]) -> Result<DMatrix<f64>, SystemError> {
        Ok(self.jacobian_fd(y)?)
    }

    fn check_state(&self, y: &[f64]) -> Result<(), SystemError> {
        let (&t, ys) = y
            .split_first()
            .ok_or(KineticsError::DimensionMismatch { expected: self.dim(), got: 0 })?;
        check_components(t, ys, self.pressure)?;
        for sp in self.mech.species() {
            sp.thermo_props(t)?;
        }
        Ok(())
    }
}
