//! NASA 7-coefficient two-range thermodynamic fits.

use super::GAS_CONSTANT;

/// One temperature range of a NASA-7 fit, coefficients `a1..a7`.
pub type Nasa7Coeffs = [f64; 7];

/// Two-range NASA-7 polynomial fit.
///
/// `c_p/R = a1 + a2 T + a3 T^2 + a4 T^3 + a5 T^4`,
/// `H/(RT) = a1 + a2 T/2 + a3 T^2/3 + a4 T^3/4 + a5 T^4/5 + a6/T`,
/// `S/R = a1 ln T + a2 T + a3 T^2/2 + a4 T^3/3 + a5 T^4/4 + a7`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nasa7 {
    pub t_low: f64,
    pub t_mid: f64,
    pub t_high: f64,
    pub low: Nasa7Coeffs,
    pub high: Nasa7Coeffs,
}

/// Molar thermodynamic properties at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoProps {
    /// Heat capacity at constant pressure, J/(mol K).
    pub cp: f64,
    /// Enthalpy, J/mol.
    pub h: f64,
    /// Standard-state entropy, J/(mol K).
    pub s: f64,
}

impl Nasa7 {
    /// Fit with the same coefficients on both ranges.
    pub fn single_range(t_low: f64, t_mid: f64, t_high: f64, coeffs: Nasa7Coeffs) -> Self {
        Nasa7 { t_low, t_mid, t_high, low: coeffs, high: coeffs }
    }

    pub fn in_range(&self, t: f64) -> bool {
        t >= self.t_low && t <= self.t_high
    }

    fn coeffs_for(&self, t: f64) -> &Nasa7Coeffs {
        if t < self.t_mid {
            &self.low
        } else {
            &self.high
        }
    }

    /// Evaluates without a range check.
    pub fn eval_unchecked(&self, t: f64) -> ThermoProps {
        eval_coeffs(self.coeffs_for(t), t)
    }

    /// `c_p/R` from each branch at `T_mid`, `(low, high)`.
    pub fn cp_at_mid(&self) -> (f64, f64) {
        (
            eval_coeffs(&self.low, self.t_mid).cp,
            eval_coeffs(&self.high, self.t_mid).cp,
        )
    }
}

fn eval_coeffs(a: &Nasa7Coeffs, t: f64) -> ThermoProps {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let cp_r = a[0] + a[1] * t + a[2] * t2 + a[3] * t3 + a[4] * t4;
    let h_rt = a[0] + a[1] * t / 2.0 + a[2] * t2 / 3.0 + a[3] * t3 / 4.0 + a[4] * t4 / 5.0 + a[5] / t;
    let s_r = a[0] * t.ln() + a[1] * t + a[2] * t2 / 2.0 + a[3] * t3 / 3.0 + a[4] * t4 / 4.0 + a[6];
    ThermoProps {
        cp: cp_r * GAS_CONSTANT,
        h: h_rt * GAS_CONSTANT * t,
        s: s_r * GAS_CONSTANT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_cp() {
        let fit = Nasa7::single_range(200.0, 1000.0, 5000.0, [3.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        for t in [300.0, 999.0, 1000.0, 2500.0] {
            let p = fit.eval_unchecked(t);
            assert_eq!(p.cp, 3.5 * GAS_CONSTANT);
        }
    }

    #[test]
    fn enthalpy_derivative_is_cp() {
        let fit = Nasa7 {
            t_low: 200.0,
            t_mid: 1000.0,
            t_high: 3500.0,
            low: [3.78, -2.99e-3, 9.85e-6, -9.68e-9, 3.24e-12, -1.06e3, 3.66],
            high: [3.28, 1.48e-3, -7.58e-7, 2.09e-10, -2.17e-14, -1.09e3, 5.45],
        };
        for t in [500.0, 999.5, 1800.0] {
            let d = 1e-3;
            let fd = (fit.eval_unchecked(t + d).h - fit.eval_unchecked(t - d).h) / (2.0 * d);
            let cp = fit.eval_unchecked(t).cp;
            assert!(((fd - cp) / cp).abs() <= 1e-6, "T={t}: {fd} vs {cp}");
        }
    }
}
