//! Error norm and step-size controller.

use std::fmt;
use std::str::FromStr;

/// Limits applied to the proposed step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampMode {
    /// `h_new = h_old * clamp(h_hat / h_old, facmin, facmax)`.
    #[default]
    Standard,
    /// `h_new = 2 h_hat` if `h_hat > 100 h_old`, else `h_new = h_hat / 100` if
    /// `h_hat < 1000 h_old`, first matching branch wins.
    Piecewise,
}

impl FromStr for ClampMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(ClampMode::Standard),
            "piecewise" | "paper_literal" => Ok(ClampMode::Piecewise),
            other => Err(format!("unknown clamp mode '{other}' (expected standard|piecewise)")),
        }
    }
}

impl fmt::Display for ClampMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClampMode::Standard => "standard",
            ClampMode::Piecewise => "piecewise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub atol: f64,
    pub rtol: f64,
    pub safety: f64,
    pub facmin: f64,
    pub facmax: f64,
    /// Order `q` of the embedded estimate; the exponent is `1/(q+1)`.
    pub order: u32,
    /// Initial step; `None` means `1e-10 * (t_final - t0)`.
    pub h0: Option<f64>,
    pub h_min: f64,
    pub clamp_mode: ClampMode,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            atol: 1e-10,
            rtol: 1e-8,
            safety: 0.9,
            facmin: 0.1,
            facmax: 5.0,
            order: 2,
            h0: None,
            h_min: 1e-30,
            clamp_mode: ClampMode::Standard,
        }
    }
}

impl ControllerConfig {
    pub fn with_tolerances(atol: f64, rtol: f64) -> Self {
        ControllerConfig { atol, rtol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(format!("tolerances must be positive (atol = {}, rtol = {})", self.atol, self.rtol));
        }
        if !(0.0 < self.facmin && self.facmin < 1.0 && 1.0 < self.facmax && self.facmax.is_finite()) {
            return Err(format!("need 0 < facmin < 1 < facmax (got {}, {})", self.facmin, self.facmax));
        }
        if !(0.0 < self.safety && self.safety <= 1.0) {
            return Err(format!("safety factor {} must lie in (0, 1]", self.safety));
        }
        if self.order == 0 {
            return Err("error-estimate order must be at least 1".into());
        }
        if !(self.h_min > 0.0) {
            return Err(format!("h_min {} must be positive", self.h_min));
        }
        if let Some(h0) = self.h0 {
            if !(h0 >= self.h_min) {
                return Err(format!("h0 {h0} must be >= h_min {}", self.h_min));
            }
        }
        Ok(())
    }
}

/// RMS of `lte_i / (atol + rtol |y_i|)`.
pub fn scaled_error_norm(lte: &[f64], y: &[f64], atol: f64, rtol: f64) -> f64 {
    if lte.is_empty() {
        return 0.0;
    }
    let sum: f64 = lte
        .iter()
        .zip(y)
        .map(|(e, yi)| {
            let r = e / (atol + rtol * yi.abs());
            r * r
        })
        .sum();
    (sum / lte.len() as f64).sqrt()
}

/// Accept/reject decision and the next step size.
pub fn controller_update(err_scaled: f64, h_old: f64, cfg: &ControllerConfig) -> (bool, f64) {
    if !err_scaled.is_finite() {
        return (false, (h_old * cfg.facmin).max(cfg.h_min));
    }
    let accept = err_scaled <= 1.0;
    let err = err_scaled.max(f64::MIN_POSITIVE);
    let h_hat = h_old * cfg.safety * err.powf(-1.0 / (cfg.order as f64 + 1.0));
    let h_new = match cfg.clamp_mode {
        ClampMode::Standard => h_old * (h_hat / h_old).clamp(cfg.facmin, cfg.facmax),
        ClampMode::Piecewise => {
            if h_hat > 100.0 * h_old {
                2.0 * h_hat
            } else if h_hat < 1000.0 * h_old {
                h_hat / 100.0
            } else {
                h_hat
            }
        }
    };
    (accept, h_new.max(cfg.h_min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_error_accepts_with_safety() {
        let cfg = ControllerConfig::default();
        let (acc, h) = controller_update(1.0, 2.0, &cfg);
        assert!(acc);
        assert!((h - 1.8).abs() < 1e-15);
    }

    #[test]
    fn growth_is_capped() {
        let cfg = ControllerConfig::default();
        let (acc, h) = controller_update(1e-6, 1.0, &cfg);
        assert!(acc);
        assert_eq!(h, 5.0);
        assert_eq!(controller_update(0.0, 1.0, &cfg), (true, 5.0));
    }

    #[test]
    fn large_error_rejects() {
        let cfg = ControllerConfig::default();
        let (acc, h) = controller_update(8.0, 1.0, &cfg);
        assert!(!acc);
        assert!((h - 0.45).abs() < 1e-15, "{h}");
        let (acc, h) = controller_update(f64::NAN, 1.0, &cfg);
        assert!(!acc);
        assert_eq!(h, 0.1);
    }

    #[test]
    fn h_min_floor() {
        let cfg = ControllerConfig { h_min: 0.5, ..Default::default() };
        assert_eq!(controller_update(1e9, 1.0, &cfg).1, 0.5);
    }

    #[test]
    fn scaled_norm() {
        let e = scaled_error_norm(&[1e-6, -1e-6], &[0.0, 100.0], 1e-6, 1e-8);
        let want = ((1.0f64 + (1e-6 / 2e-6f64).powi(2)) / 2.0).sqrt();
        assert!((e - want).abs() < 1e-15);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("standard".parse::<ClampMode>().unwrap(), ClampMode::Standard);
        assert_eq!("paper_literal".parse::<ClampMode>().unwrap(), ClampMode::Piecewise);
        assert!("other".parse::<ClampMode>().is_err());
    }
}
