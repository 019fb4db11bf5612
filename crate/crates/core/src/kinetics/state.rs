use super::KineticsError;

/// Overshoot tolerated on mass fractions, both below 0 and above 1.
pub const MASS_FRACTION_EPS: f64 = 1e-8;

/// Temperature, mass fractions and the (fixed) pressure of a reactor.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoState {
    /// Temperature, K.
    pub temperature: f64,
    /// Mass fractions in mechanism order.
    pub mass_fractions: Vec<f64>,
    /// Pressure, Pa.
    pub pressure: f64,
}

impl ThermoState {
    /// Initial state; additionally requires `|sum Y - 1| <= 1e-8`.
    pub fn initial(temperature: f64, mass_fractions: Vec<f64>, pressure: f64) -> Result<Self, KineticsError> {
        let state = ThermoState::new(temperature, mass_fractions, pressure)?;
        let sum: f64 = state.mass_fractions.iter().sum();
        if (sum - 1.0).abs() > MASS_FRACTION_EPS {
            return Err(KineticsError::InvalidState {
                index: 1,
                reason: format!("mass fractions sum to {sum}, expected 1"),
            });
        }
        Ok(state)
    }

    pub fn new(temperature: f64, mass_fractions: Vec<f64>, pressure: f64) -> Result<Self, KineticsError> {
        check_components(temperature, &mass_fractions, pressure)?;
        Ok(ThermoState { temperature, mass_fractions, pressure })
    }

    /// Rebuilds a state from `[T, Y_1, ..., Y_K]`.
    pub fn from_vector(y: &[f64], pressure: f64) -> Result<Self, KineticsError> {
        let (&t, ys) = y.split_first().ok_or(KineticsError::DimensionMismatch { expected: 2, got: 0 })?;
        ThermoState::new(t, ys.to_vec(), pressure)
    }

    /// `[T, Y_1, ..., Y_K]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.mass_fractions.len() + 1);
        v.push(self.temperature);
        v.extend_from_slice(&self.mass_fractions);
        v
    }
}

/// Validates a flattened state vector against the state invariants.
pub(crate) fn check_components(t: f64, ys: &[f64], p: f64) -> Result<(), KineticsError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(KineticsError::InvalidState { index: 0, reason: format!("temperature {t} must be positive") });
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(KineticsError::InvalidState { index: 0, reason: format!("pressure {p} must be positive") });
    }
    for (i, &y) in ys.iter().enumerate() {
        if !(-MASS_FRACTION_EPS..=1.0 + MASS_FRACTION_EPS).contains(&y) {
            return Err(KineticsError::InvalidState {
                index: i + 1,
                reason: format!("mass fraction {y} outside [-{MASS_FRACTION_EPS:e}, 1+{MASS_FRACTION_EPS:e}]"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_round_trip() {
        let s = ThermoState::initial(1200.0, vec![0.25, 0.75], 101325.0).unwrap();
        let v = s.to_vector();
        assert_eq!(v, vec![1200.0, 0.25, 0.75]);
        assert_eq!(ThermoState::from_vector(&v, 101325.0).unwrap(), s);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ThermoState::new(-1.0, vec![1.0], 1e5).is_err());
        assert!(ThermoState::new(300.0, vec![1.0], 0.0).is_err());
        assert!(ThermoState::new(300.0, vec![1.0, -1e-7], 1e5).is_err());
        assert!(ThermoState::new(300.0, vec![1.0, -1e-9], 1e5).is_ok());
        assert!(ThermoState::initial(300.0, vec![0.5, 0.4], 1e5).is_err());
    }
}
