use nalgebra::{DMatrix, DVector};

use super::{expm, PhiError};

/// Largest augmented dimension `n + p` the dense route accepts.
pub const DENSE_ORACLE_MAX: usize = 400;

/// Builds `[[A, B], [0, J_p]]` with `B = [b_p, ..., b_1]` and `J_p` the nilpotent upshift.
pub fn augmented_matrix(a: &DMatrix<f64>, bs: &[DVector<f64>]) -> Result<DMatrix<f64>, PhiError> {
    let n = check_inputs(a, bs)?;
    let p = bs.len().saturating_sub(1);
    let mut aug = DMatrix::zeros(n + p, n + p);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    for (k, b) in bs.iter().enumerate().skip(1) {
        // column n + (p - k) holds b_k
        aug.view_mut((0, n + p - k), (n, 1)).copy_from(b);
    }
    for i in 0..p.saturating_sub(1) {
        aug[(n + i, n + i + 1)] = 1.0;
    }
    Ok(aug)
}

/// `sum_k phi_k(A) b_k` through one dense exponential of the augmented matrix.
pub fn dense_phi_oracle(a: &DMatrix<f64>, bs: &[DVector<f64>]) -> Result<DVector<f64>, PhiError> {
    let n = check_inputs(a, bs)?;
    let p = bs.len() - 1;
    if n + p > DENSE_ORACLE_MAX {
        return Err(PhiError::DimensionMismatch(format!(
            "dense oracle limited to n + p <= {DENSE_ORACLE_MAX}, got {}",
            n + p
        )));
    }
    let aug = augmented_matrix(a, bs)?;
    let e = expm(&aug)?;
    let mut v = DVector::zeros(n + p);
    v.rows_mut(0, n).copy_from(&bs[0]);
    if p > 0 {
        v[n + p - 1] = 1.0;
    }
    Ok((e * v).rows(0, n).into_owned())
}

fn check_inputs(a: &DMatrix<f64>, bs: &[DVector<f64>]) -> Result<usize, PhiError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(PhiError::DimensionMismatch(format!("matrix is {}x{}", n, a.ncols())));
    }
    if bs.is_empty() {
        return Err(PhiError::DimensionMismatch("at least b_0 is required".into()));
    }
    if let Some(b) = bs.iter().find(|b| b.len() != n) {
        return Err(PhiError::DimensionMismatch(format!("vector of length {} for a {n}x{n} matrix", b.len())));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::phi_scalar;

    #[test]
    fn zero_matrix_phi1() {
        let a = DMatrix::zeros(3, 3);
        let b1 = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let w = dense_phi_oracle(&a, &[DVector::zeros(3), b1.clone()]).unwrap();
        assert!((w - b1).norm() < 1e-15);
    }

    #[test]
    fn diagonal_reduces_to_scalar() {
        let d = [-3.0, -0.5, 0.0, 1.2, -25.0];
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&d));
        for (i, &di) in d.iter().enumerate() {
            let mut bs = vec![DVector::zeros(5); 4];
            for b in &mut bs {
                b[i] = 1.0;
            }
            let w = dense_phi_oracle(&a, &bs).unwrap();
            let want: f64 = (0..4).map(|k| phi_scalar(k, di)).sum();
            assert!(((w[i] - want) / want).abs() < 1e-13, "d = {di}: {} vs {want}", w[i]);
        }
    }

    #[test]
    fn augmented_layout() {
        let a = DMatrix::from_element(2, 2, 7.0);
        let bs = vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::from_vec(vec![2.0, 2.0]),
            DVector::from_vec(vec![3.0, 3.0]),
        ];
        let aug = augmented_matrix(&a, &bs).unwrap();
        assert_eq!(aug.nrows(), 5);
        assert_eq!(aug[(0, 2)], 3.0);
        assert_eq!(aug[(0, 3)], 2.0);
        assert_eq!(aug[(0, 4)], 1.0);
        assert_eq!(aug[(2, 3)], 1.0);
        assert_eq!(aug[(3, 4)], 1.0);
        assert_eq!(aug[(4, 4)], 0.0);
    }
}
