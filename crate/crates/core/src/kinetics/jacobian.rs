use nalgebra::DMatrix;

/// Perturbation `sqrt(u) * max(|y|, typ)` for one component.
pub fn fd_step(y: f64, typical: f64) -> f64 {
    f64::EPSILON.sqrt() * y.abs().max(typical)
}

/// Dense Jacobian of `f` at `y` by central differences.
///
/// If one side of a central difference is rejected by `f`, the other side is
/// used as a one-sided difference; if both are rejected the error of the
/// forward evaluation is returned.
pub fn fd_jacobian<E, F>(mut f: F, y: &[f64], typical: &[f64]) -> Result<DMatrix<f64>, E>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<(), E>,
{
    let n = y.len();
    assert_eq!(typical.len(), n, "typical-scale vector must match state length");
    let mut jac = DMatrix::zeros(n, n);
    let mut f_base: Option<Vec<f64>> = None;
    let mut yp = y.to_vec();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for j in 0..n {
        let delta = fd_step(y[j], typical[j]);
        yp[j] = y[j] + delta;
        let hp = yp[j] - y[j];
        let fp = f(&yp, &mut plus);
        yp[j] = y[j] - delta;
        let hm = y[j] - yp[j];
        let fm = f(&yp, &mut minus);
        yp[j] = y[j];
        match (fp, fm) {
            (Ok(()), Ok(())) => {
                for i in 0..n {
                    jac[(i, j)] = (plus[i] - minus[i]) / (hp + hm);
                }
            }
            (Ok(()), Err(_)) => {
                let base = base_value(&mut f, y, &mut f_base)?;
                for i in 0..n {
                    jac[(i, j)] = (plus[i] - base[i]) / hp;
                }
            }
            (Err(_), Ok(())) => {
                let base = base_value(&mut f, y, &mut f_base)?;
                for i in 0..n {
                    jac[(i, j)] = (base[i] - minus[i]) / hm;
                }
            }
            (Err(e), Err(_)) => return Err(e),
        }
    }
    Ok(jac)
}

fn base_value<'a, E, F>(f: &mut F, y: &[f64], cache: &'a mut Option<Vec<f64>>) -> Result<&'a [f64], E>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<(), E>,
{
    if cache.is_none() {
        let mut out = vec![0.0; y.len()];
        f(y, &mut out)?;
        *cache = Some(out);
    }
    Ok(cache.as_deref().unwrap())
}
