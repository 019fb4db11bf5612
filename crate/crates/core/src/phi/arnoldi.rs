//! Arnoldi process with modified Gram-Schmidt and one reorthogonalization pass.

use nalgebra::{DMatrix, DVector};

use super::PhiError;

/// A square linear map applied to dense vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let col = self.column(j);
            for i in 0..n {
                y[i] += col[i] * xj;
            }
        }
    }
}

/// Incrementally built Krylov basis `V` and Hessenberg matrix `H` with `A V_m = V_{m+1} Hbar_m`.
#[derive(Debug, Clone)]
pub struct Arnoldi {
    basis: Vec<Vec<f64>>,
    /// Column-major `(m_max + 1) x m_max` Hessenberg storage.
    h: DMatrix<f64>,
    beta: f64,
    m: usize,
    breakdown: bool,
    breakdown_tol: f64,
    matvecs: usize,
}

impl Arnoldi {
    /// Starts from `v`, normalized internally. Fails for a zero or non-finite vector.
    pub fn new(v: &[f64], m_max: usize, breakdown_tol: f64) -> Result<Self, PhiError> {
        let beta = norm2(v);
        if !beta.is_finite() {
            return Err(PhiError::NonFinite);
        }
        if beta == 0.0 {
            return Err(PhiError::ZeroVector);
        }
        let m_max = m_max.min(v.len()).max(1);
        Ok(Arnoldi {
            basis: vec![v.iter().map(|x| x / beta).collect()],
            h: DMatrix::zeros(m_max + 1, m_max),
            beta,
            m: 0,
            breakdown: false,
            breakdown_tol,
            matvecs: 0,
        })
    }

    /// Norm of the starting vector.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Current basis size `m`.
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn capacity(&self) -> usize {
        self.h.ncols()
    }

    /// True when the subspace became invariant (the projection is then exact).
    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn matvecs(&self) -> usize {
        self.matvecs
    }

    /// Grows the basis to `target` vectors, stopping early on breakdown.
    pub fn extend<Op: LinearOperator + ?Sized>(&mut self, op: &Op, target: usize) {
        let n = self.basis[0].len();
        let target = target.min(self.capacity());
        let mut w = vec![0.0; n];
        while self.m < target && !self.breakdown {
            let j = self.m;
            op.apply(&self.basis[j], &mut w);
            self.matvecs += 1;
            let scale = norm2(&w);
            for _pass in 0..2 {
                for (i, vi) in self.basis.iter().enumerate() {
                    let c = dot(vi, &w);
                    self.h[(i, j)] += c;
                    axpy(-c, vi, &mut w);
                }
            }
            let nrm = norm2(&w);
            self.h[(j + 1, j)] = nrm;
            self.m += 1;
            if nrm <= self.breakdown_tol * scale || self.m == n {
                self.breakdown = true;
                break;
            }
            self.basis.push(w.iter().map(|x| x / nrm).collect());
        }
    }

    /// `m x m` leading block of `H`.
    pub fn hessenberg(&self) -> DMatrix<f64> {
        self.h.view((0, 0), (self.m, self.m)).into_owned()
    }

    /// `h_{m+1,m}`; zero when `m == 0`.
    pub fn subdiagonal(&self) -> f64 {
        if self.m == 0 {
            0.0
        } else {
            self.h[(self.m, self.m - 1)]
        }
    }

    /// Basis vector `j` (`j <= m` unless broken down).
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.basis[j]
    }

    /// `n x m` basis matrix.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.basis[0].len();
        DMatrix::from_fn(n, self.m, |i, j| self.basis[j][i])
    }

    /// `beta * V_m * c` for a coefficient vector of length `m`.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.basis[0].len();
        let mut out = vec![0.0; n];
        for (j, &c) in coeffs.iter().enumerate().take(self.m) {
            axpy(self.beta * c, &self.basis[j], &mut out);
        }
        out
    }
}

/// Result of a standalone Arnoldi run on a dense matrix.
#[derive(Debug, Clone)]
pub struct ArnoldiResult {
    /// `n x m` orthonormal basis.
    pub v: DMatrix<f64>,
    /// `m x m` upper-Hessenberg projection.
    pub h: DMatrix<f64>,
    /// `h_{m+1,m}`.
    pub h_next: f64,
    /// `v_{m+1}`, absent on breakdown.
    pub v_next: Option<DVector<f64>>,
    pub breakdown: bool,
}

/// Runs `m_max` Arnoldi steps of `a` from `v`.
pub fn arnoldi(a: &DMatrix<f64>, v: &[f64], m_max: usize, tol: f64) -> Result<ArnoldiResult, PhiError> {
    if a.nrows() != a.ncols() || a.nrows() != v.len() {
        return Err(PhiError::DimensionMismatch(format!(
            "{}x{} matrix with vector of length {}",
            a.nrows(),
            a.ncols(),
            v.len()
        )));
    }
    let mut arn = Arnoldi::new(v, m_max, tol)?;
    arn.extend(a, m_max);
    let v_next = if arn.breakdown() {
        None
    } else {
        Some(DVector::from_column_slice(arn.vector(arn.dim())))
    };
    Ok(ArnoldiResult {
        v: arn.basis_matrix(),
        h: arn.hessenberg(),
        h_next: arn.subdiagonal(),
        v_next,
        breakdown: arn.breakdown(),
    })
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvector_breaks_down_immediately() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 4.0, 0.0, 0.0, 5.0]);
        let res = arnoldi(&a, &[3.0, 0.0, 0.0], 3, 1e-12).unwrap();
        assert!(res.breakdown);
        assert_eq!(res.h.nrows(), 1);
        assert!((res.h[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn full_space_is_exact() {
        let n = 6;
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 3.0 } else { 0.0 });
        let v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let res = arnoldi(&a, &v, n, 1e-12).unwrap();
        let m = res.h.nrows();
        let resid = &a * &res.v - &res.v * &res.h;
        if m == n {
            assert!(resid.norm() <= 1e-10 * a.norm());
            let vtv = res.v.transpose() * &res.v;
            assert!((vtv - DMatrix::identity(n, n)).norm() < 1e-12);
        } else {
            // early breakdown: invariant subspace
            assert!(res.breakdown);
            assert!(resid.norm() <= 1e-10 * a.norm());
        }
    }

    #[test]
    fn zero_vector_is_rejected() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(arnoldi(&a, &[0.0, 0.0], 2, 1e-12), Err(PhiError::ZeroVector)));
    }
}
