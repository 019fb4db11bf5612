/// Below this magnitude `phi_k` is summed from its Taylor series.
///
/// The recurrence loses roughly `k * log10(1/|z|)` digits, so the series is
/// used on the whole unit disc.
const TAYLOR_RADIUS: f64 = 1.0;
const TAYLOR_TERMS: usize = 40;

/// Scalar `phi_k(z)`: `phi_0 = e^z`, `phi_{k+1}(z) = (phi_k(z) - 1/k!) / z`.
pub fn phi_scalar(k: usize, z: f64) -> f64 {
    if z.abs() < TAYLOR_RADIUS {
        return phi_taylor(k, z);
    }
    let mut phi = z.exp();
    let mut fact = 1.0;
    for j in 0..k {
        if j > 0 {
            fact *= j as f64;
        }
        phi = (phi - 1.0 / fact) / z;
    }
    phi
}

/// `phi_0..=phi_k` at `z`, index `j` holding `phi_j(z)`.
pub fn phi_scalars(k: usize, z: f64) -> Vec<f64> {
    (0..=k).map(|j| phi_scalar(j, z)).collect()
}

fn phi_taylor(k: usize, z: f64) -> f64 {
    // sum_i z^i / (i + k)!
    let mut term = 1.0;
    for j in 2..=k {
        term /= j as f64;
    }
    let mut sum = term;
    for i in 1..TAYLOR_TERMS {
        term *= z / (i + k) as f64;
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
    }
    sum
}
