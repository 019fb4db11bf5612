//! Dense nonsymmetric eigenvalues: balancing, Householder reduction to
//! Hessenberg form, then Francis double-shift QR on the Hessenberg matrix.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

/// Largest accepted matrix order.
pub const EIGEN_MAX_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix is {rows}x{cols}; expected square of order <= {EIGEN_MAX_DIM}")]
    BadShape { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge within {sweeps} sweeps ({found} of {n} eigenvalues found)")]
    NoConvergence { sweeps: usize, found: usize, n: usize },
}

/// All `n` eigenvalues of a real square matrix. Complex eigenvalues come in
/// exact conjugate pairs. Order is unspecified.
pub fn eigenvalues_dense(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>, EigenError> {
    let (rows, cols) = a.shape();
    if rows != cols || rows > EIGEN_MAX_DIM {
        return Err(EigenError::BadShape { rows, cols });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let n = rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let (wr, wi) = hqr(&mut h)?;
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
}

/// Diagonal similarity by powers of two so row and column norms are comparable.
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place orthogonal similarity to upper-Hessenberg form.
fn hessenberg(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut u = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| a[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in m..n {
            u[i] = a[(i, m - 1)] / scale;
            hh += u[i] * u[i];
        }
        let mut g = hh.sqrt();
        if u[m] > 0.0 {
            g = -g;
        }
        hh -= u[m] * g;
        u[m] -= g;
        for j in m - 1..n {
            let f: f64 = (m..n).map(|i| u[i] * a[(i, j)]).sum::<f64>() / hh;
            for i in m..n {
                a[(i, j)] -= f * u[i];
            }
        }
        for i in 0..n {
            let f: f64 = (m..n).map(|j| u[j] * a[(i, j)]).sum::<f64>() / hh;
            for j in m..n {
                a[(i, j)] -= f * u[j];
            }
        }
        a[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            a[(i, m - 1)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper-Hessenberg matrix, which is destroyed.
fn hqr(a: &mut DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>), EigenError> {
    let n = a.nrows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let max_sweeps = 30 * n;
    let mut sweeps = 0;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Smallest l with a negligible subdiagonal a[l, l-1] (l = 0 if none).
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() + s == s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }

            if sweeps >= max_sweeps {
                return Err(EigenError::NoConvergence { sweeps, found: n - 1 - nu, n });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            // Two consecutive small subdiagonals.
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            // Double-shift QR sweep on rows/columns l..=nu.
            let mut k = m;
            while k < nu {
                let mut xk = 0.0;
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nu - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * xk;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * zz;
                        }
                        a[(k + 1, j)] -= pp * yy;
                        a[(k, j)] -= pp * xx;
                    }
                    let mmin = nu.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = xx * a[(i, k)] + yy * a[(i, k + 1)];
                        if k != nu - 1 {
                            pp += zz * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((wr, wi))
}
