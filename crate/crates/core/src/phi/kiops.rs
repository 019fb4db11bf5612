//! Adaptive Krylov evaluation of `w(T) = sum_k T^k phi_k(T A) b_k`.
//!
//! The `b` vectors are folded into one augmented operator so that every
//! output is a single exponential-vector product. The interval `(0, 1]` is
//! covered by substeps; each substep projects onto a fresh Krylov basis and
//! exponentiates the small Hessenberg matrix by Padé.

use nalgebra::{DMatrix, DVector};

use super::arnoldi::{norm2, Arnoldi, LinearOperator};
use super::{expm, PhiError};

/// Largest supported `p` (vectors `b_0..=b_p`).
pub const MAX_PHI_ORDER: usize = 3;

/// Tuning knobs of the substep / basis-size adaptation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KiopsOptions {
    /// Initial Krylov dimension.
    pub m_init: usize,
    /// Largest Krylov dimension.
    pub m_max: usize,
    /// Smallest substep as a fraction of the interval.
    pub min_substep: f64,
    /// Basis growth factor applied on a failed substep.
    pub growth: f64,
    /// An accepted substep whose error is below this fraction of its target
    /// doubles the next substep.
    pub easy_fraction: f64,
    /// Relative threshold on `h_{j+1,j}` for declaring breakdown.
    pub breakdown_tol: f64,
}

impl Default for KiopsOptions {
    fn default() -> Self {
        KiopsOptions {
            m_init: 10,
            m_max: 128,
            min_substep: 1e-8,
            growth: 4.0 / 3.0,
            easy_fraction: 0.1,
            breakdown_tol: 1e-12,
        }
    }
}

/// One linear-combination evaluation task.
#[derive(Debug, Clone, Copy)]
pub struct PhiRequest<'a> {
    /// Square `n x n` matrix `A`.
    pub matrix: &'a DMatrix<f64>,
    /// `b_0..=b_p`, each of length `n`.
    pub vectors: &'a [DVector<f64>],
    /// Strictly increasing points in `(0, 1]`, the last equal to 1.
    pub time_points: &'a [f64],
    /// Relative tolerance on each output.
    pub tol: f64,
}

impl PhiRequest<'_> {
    pub fn validate(&self) -> Result<(), PhiError> {
        let n = self.matrix.nrows();
        if self.matrix.ncols() != n {
            return Err(PhiError::DimensionMismatch(format!("matrix is {}x{}", n, self.matrix.ncols())));
        }
        if self.vectors.is_empty() || self.vectors.len() > MAX_PHI_ORDER + 1 {
            return Err(PhiError::DimensionMismatch(format!(
                "expected 1..={} vectors, got {}",
                MAX_PHI_ORDER + 1,
                self.vectors.len()
            )));
        }
        if let Some(b) = self.vectors.iter().find(|b| b.len() != n) {
            return Err(PhiError::DimensionMismatch(format!("vector of length {} for n = {n}", b.len())));
        }
        let tp = self.time_points;
        let increasing = tp.windows(2).all(|w| w[0] < w[1]);
        if tp.is_empty() || !increasing || tp[0] <= 0.0 || *tp.last().unwrap() != 1.0 {
            return Err(PhiError::InvalidTimePoints(tp.to_vec()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(PhiError::InvalidTolerance(self.tol));
        }
        if self.matrix.iter().chain(self.vectors.iter().flat_map(|b| b.iter())).any(|x| !x.is_finite()) {
            return Err(PhiError::NonFinite);
        }
        Ok(())
    }
}

/// Work counters of one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KiopsStats {
    /// Largest Krylov dimension used.
    pub krylov_dim: usize,
    /// Accepted substeps `M`.
    pub substeps: usize,
    /// Rejected substep attempts.
    pub rejections: usize,
    /// Products with the augmented operator.
    pub matvecs: usize,
}

impl KiopsStats {
    pub fn merge(&mut self, other: &KiopsStats) {
        self.krylov_dim = self.krylov_dim.max(other.krylov_dim);
        self.substeps += other.substeps;
        self.rejections += other.rejections;
        self.matvecs += other.matvecs;
    }
}

/// Outputs in the order of the requested time points.
#[derive(Debug, Clone)]
pub struct PhiResult {
    pub values: Vec<DVector<f64>>,
    pub stats: KiopsStats,
}

/// `[[A, nu B], [0, J]]` applied without forming it.
struct AugmentedOperator<'a> {
    a: &'a DMatrix<f64>,
    /// `nu * b_p, ..., nu * b_1`.
    flipped: Vec<DVector<f64>>,
}

impl LinearOperator for AugmentedOperator<'_> {
    fn dim(&self) -> usize {
        self.a.nrows() + self.flipped.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.a.nrows();
        let p = self.flipped.len();
        self.a.apply(&x[..n], &mut y[..n]);
        for (k, b) in self.flipped.iter().enumerate() {
            let c = x[n + k];
            if c != 0.0 {
                for i in 0..n {
                    y[i] += c * b[i];
                }
            }
        }
        for k in 0..p - 1 {
            y[n + k] = x[n + k + 1];
        }
        y[n + p - 1] = 0.0;
    }
}

/// Evaluates a [`PhiRequest`] by adaptive Krylov projection.
pub fn kiops_eval(req: &PhiRequest<'_>, opts: &KiopsOptions) -> Result<PhiResult, PhiError> {
    req.validate()?;
    let n = req.matrix.nrows();
    let zero = DVector::zeros(n);
    let mut bs: Vec<&DVector<f64>> = req.vectors.iter().collect();
    if bs.len() == 1 {
        bs.push(&zero);
    }
    let p = bs.len() - 1;

    // Power-of-two scaling keeps the polynomial tail commensurate with the b-vectors.
    let norm_b = bs[1..]
        .iter()
        .map(|b| b.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let (nu, mu) = if norm_b > 0.0 {
        let ex = norm_b.log2().ceil();
        (2f64.powf(-ex), 2f64.powf(ex))
    } else {
        (1.0, 1.0)
    };
    let op = AugmentedOperator {
        a: req.matrix,
        flipped: (1..=p).rev().map(|k| bs[k] * nu).collect(),
    };
    let aug_dim = n + p;
    let m_cap = opts.m_max.min(aug_dim).max(1);
    let mut m = opts.m_init.clamp(1, m_cap);

    let mut stats = KiopsStats::default();
    let mut values = Vec::with_capacity(req.time_points.len());
    let mut w: Vec<f64> = bs[0].iter().copied().collect();
    let mut tau_now = 0.0;
    let mut tau: f64 = 1.0;
    let mut next_out = 0;
    let mut start = vec![0.0; aug_dim];

    while next_out < req.time_points.len() {
        start[..n].copy_from_slice(&w);
        fill_polynomial_tail(&mut start[n..], tau_now, mu);
        let mut arn = Arnoldi::new(&start, m_cap, opts.breakdown_tol)?;
        loop {
            arn.extend(&op, m);
            let j = arn.dim();
            stats.krylov_dim = stats.krylov_dim.max(j);
            let happy = arn.breakdown();
            let target_time = req.time_points[next_out];
            // An invariant subspace makes the projection exact over any length.
            let step = if happy { target_time - tau_now } else { tau.min(target_time - tau_now) };
            let (w_new, err) = project(&arn, step, happy)?;
            let w_top = &w_new[..n];
            let target = req.tol * norm2(w_top).max(f64::MIN_POSITIVE) * step;
            if err <= target {
                stats.substeps += 1;
                if happy {
                    values.push(DVector::from_column_slice(w_top));
                    for &t in &req.time_points[next_out + 1..] {
                        let (wt, _) = project(&arn, t - tau_now, true)?;
                        values.push(DVector::from_column_slice(&wt[..n]));
                    }
                    next_out = req.time_points.len();
                    break;
                }
                w.copy_from_slice(w_top);
                if step >= target_time - tau_now {
                    tau_now = target_time;
                    values.push(DVector::from_column_slice(&w));
                    next_out += 1;
                } else {
                    tau_now += step;
                }
                if step == tau && err <= opts.easy_fraction * target {
                    tau *= 2.0;
                }
                break;
            }
            stats.rejections += 1;
            if !happy && j < m_cap {
                m = ((m as f64 * opts.growth).ceil() as usize).clamp(m + 1, m_cap);
            } else {
                tau = step / 2.0;
                if tau < opts.min_substep {
                    stats.matvecs += arn.matvecs();
                    return Err(PhiError::ConvergenceFailure {
                        time: tau_now,
                        substep: step,
                        krylov_dim: j,
                        error: err,
                        target,
                        stats,
                    });
                }
            }
        }
        stats.matvecs += arn.matvecs();
    }
    Ok(PhiResult { values, stats })
}

/// Tail `mu * [t^{p-1}/(p-1)!, ..., t, 1]` of the augmented state at time `t`.
fn fill_polynomial_tail(tail: &mut [f64], t: f64, mu: f64) {
    let p = tail.len();
    for (k, slot) in tail.iter_mut().enumerate() {
        let power = p - 1 - k;
        let mut v = mu;
        for i in 1..=power {
            v *= t / i as f64;
        }
        *slot = v;
    }
}

/// Projected propagation over `step`: the new augmented vector and its error estimate.
fn project(arn: &Arnoldi, step: f64, happy: bool) -> Result<(Vec<f64>, f64), PhiError> {
    let j = arn.dim();
    let h = arn.hessenberg();
    if happy {
        let e = expm(&(h * step))?;
        let coeffs: Vec<f64> = e.column(0).iter().copied().collect();
        return Ok((arn.combine(&coeffs), 0.0));
    }
    // [[H, e_1], [0, 0]]: the last column of its exponential carries step * phi_1(step H) e_1.
    let mut hbar = DMatrix::zeros(j + 1, j + 1);
    hbar.view_mut((0, 0), (j, j)).copy_from(&h);
    hbar[(0, j)] = 1.0;
    let e = expm(&(hbar * step))?;
    let coeffs: Vec<f64> = e.view((0, 0), (j, 1)).iter().copied().collect();
    let err = (arn.beta() * arn.subdiagonal() * e[(j - 1, j)]).abs();
    Ok((arn.combine(&coeffs), err))
}
