//! Jacobian spectrum extent and per-step cost.

mod eigen;

use nalgebra::Complex;

pub use eigen::{eigenvalues_dense, EigenError, EIGEN_MAX_DIM};

use crate::integrator::StepRecord;

/// Axis-aligned bounding rectangle of a spectrum in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumStats {
    pub t: f64,
    /// Real extent `max Re - min Re`.
    pub alpha: f64,
    /// Imaginary extent `max Im - min Im`.
    pub beta: f64,
    /// `alpha * beta`.
    pub omega: f64,
    pub max_real: f64,
}

/// Bounding rectangle of a non-empty eigenvalue list, stamped with time `t`.
///
/// # Panics
/// If `eigs` is empty.
pub fn spectrum_bounds(t: f64, eigs: &[Complex<f64>]) -> SpectrumStats {
    assert!(!eigs.is_empty(), "spectrum_bounds needs at least one eigenvalue");
    let (mut re_lo, mut re_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for z in eigs {
        re_lo = re_lo.min(z.re);
        re_hi = re_hi.max(z.re);
        im_lo = im_lo.min(z.im);
        im_hi = im_hi.max(z.im);
    }
    let alpha = re_hi - re_lo;
    let beta = im_hi - im_lo;
    SpectrumStats { t, alpha, beta, omega: alpha * beta, max_real: re_hi }
}

/// CPU seconds per unit of simulated time for one step.
pub fn normalized_step_cost(record: &StepRecord) -> f64 {
    record.cpu_seconds / record.h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::KiopsStats;

    #[test]
    fn rectangle() {
        let eigs = [Complex::new(-1.0, 0.0), Complex::new(-3.0, 0.0), Complex::new(0.0, 2.0), Complex::new(0.0, -2.0)];
        let s = spectrum_bounds(0.5, &eigs);
        assert_eq!((s.alpha, s.beta, s.omega, s.max_real, s.t), (3.0, 4.0, 12.0, 0.0, 0.5));
        let s = spectrum_bounds(0.0, &[Complex::new(-7.0, 0.0)]);
        assert_eq!((s.alpha, s.beta, s.omega), (0.0, 0.0, 0.0));
    }

    #[test]
    fn step_cost() {
        let mut r = StepRecord {
            t: 0.0,
            h: 1e-6,
            accepted: true,
            err_scaled: 0.5,
            kiops: [KiopsStats::default(); 2],
            kiops_calls: 2,
            prior_rejections: 0,
            cpu_seconds: 1e-3,
        };
        assert!((normalized_step_cost(&r) - 1000.0).abs() < 1e-9);
        r.h *= 2.0;
        assert!((normalized_step_cost(&r) - 500.0).abs() < 1e-9);
    }
}
