//! Dense matrix exponential by degree-13 Padé with scaling and squaring.

use nalgebra::DMatrix;

use super::PhiError;

/// Largest 1-norm for which the unscaled degree-13 approximant is used.
pub const THETA_13: f64 = 5.371920351148152;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Number of squarings `ceil(log2(||A||_1 / theta_13))`, at least 0.
pub fn squaring_count(norm: f64) -> u32 {
    if norm <= THETA_13 {
        0
    } else {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    }
}

/// `e^A` for a square matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>, PhiError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(PhiError::DimensionMismatch(format!("expm of a {}x{} matrix", n, a.ncols())));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(PhiError::NonFinite);
    }
    let s = squaring_count(norm);
    let a = if s > 0 { a * (0.5f64).powi(s as i32) } else { a.clone() };

    let b = &PADE13;
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];

    let lu = (&v - &u).lu();
    let mut r = lu.solve(&(&v + &u)).ok_or(PhiError::SingularPade)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(PhiError::NonFinite);
    }
    Ok(r)
}
