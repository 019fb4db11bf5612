//! Rates, production terms and the right-hand side `F(y)`.

use super::state::check_components;
use super::{
    KineticsError, Mechanism, Reaction, ReverseRateConvention, ThermoProps, ThermoState, EXP_CLAMP, GAS_CONSTANT,
    STANDARD_PRESSURE,
};

/// Mean molar mass `(sum Y_i / W_i)^-1`, kg/mol.
pub fn mean_molar_mass(mass_fractions: &[f64], mech: &Mechanism) -> f64 {
    let inv: f64 = mass_fractions
        .iter()
        .zip(mech.species())
        .map(|(y, s)| y / s.molar_mass)
        .sum();
    1.0 / inv
}

/// Ideal-gas mixture density `p W / (R T)`, kg/m^3.
pub fn density(state: &ThermoState, mech: &Mechanism) -> Result<f64, KineticsError> {
    check_len(state.mass_fractions.len(), mech)?;
    density_raw(state.temperature, &state.mass_fractions, state.pressure, mech)
}

fn density_raw(t: f64, ys: &[f64], p: f64, mech: &Mechanism) -> Result<f64, KineticsError> {
    let rho = p * mean_molar_mass(ys, mech) / (GAS_CONSTANT * t);
    if !rho.is_finite() || rho <= 0.0 {
        return Err(KineticsError::InvalidState { index: 0, reason: format!("density evaluates to {rho}") });
    }
    Ok(rho)
}

/// Molar concentrations `rho Y_i / W_i`, mol/m^3. Slightly negative mass fractions count as zero.
pub fn concentrations(state: &ThermoState, mech: &Mechanism) -> Result<Vec<f64>, KineticsError> {
    let rho = density(state, mech)?;
    Ok(concentrations_raw(rho, &state.mass_fractions, mech))
}

fn concentrations_raw(rho: f64, ys: &[f64], mech: &Mechanism) -> Vec<f64> {
    ys.iter()
        .zip(mech.species())
        .map(|(&y, s)| rho * y.max(0.0) / s.molar_mass)
        .collect()
}

/// Forward rate constant of a reaction.
pub fn forward_rate(t: f64, rxn: &Reaction) -> f64 {
    rxn.forward.eval(t).0
}

/// Equilibrium constant in concentration units, `K_p (p0/(R T))^dnu`.
pub fn equilibrium_constant(t: f64, rxn: &Reaction, mech: &Mechanism) -> Result<f64, KineticsError> {
    let mut props = Vec::with_capacity(mech.n_species());
    for sp in mech.species() {
        props.push(sp.thermo_props(t)?);
    }
    Ok(equilibrium_from_props(t, rxn, &props).0)
}

fn equilibrium_from_props(t: f64, rxn: &Reaction, props: &[ThermoProps]) -> (f64, bool) {
    let rt = GAS_CONSTANT * t;
    let mut neg_dg_rt = 0.0;
    let mut dnu = 0i64;
    for (i, nu) in rxn.net_stoich() {
        let g_rt = props[i].h / rt - props[i].s / GAS_CONSTANT;
        neg_dg_rt -= nu as f64 * g_rt;
        dnu += nu;
    }
    let arg = neg_dg_rt + dnu as f64 * (STANDARD_PRESSURE / rt).ln();
    let saturated = arg.abs() > EXP_CLAMP;
    (arg.clamp(-EXP_CLAMP, EXP_CLAMP).exp(), saturated)
}

/// Reverse rate constant. Irreversible reactions give 0; explicit reverse parameters win.
pub fn reverse_rate(t: f64, forward: f64, kc: f64, rxn: &Reaction, convention: ReverseRateConvention) -> f64 {
    if !rxn.reversible {
        return 0.0;
    }
    if let Some(rev) = &rxn.explicit_reverse {
        return rev.eval(t).0;
    }
    match convention {
        ReverseRateConvention::Divide => forward / kc,
        ReverseRateConvention::Multiply => forward * kc,
    }
}

/// Net rate of every reaction, mol/(m^3 s).
pub fn reaction_rates(
    state: &ThermoState,
    mech: &Mechanism,
    convention: ReverseRateConvention,
) -> Result<Vec<f64>, KineticsError> {
    let mut ev = SourceEval::new(mech, state.pressure, convention);
    ev.evaluate(&state.to_vector())?;
    Ok(ev.rates)
}

/// Species production rates `sum_j (v'' - v') R_j`, mol/(m^3 s).
pub fn production_rates(rates: &[f64], mech: &Mechanism) -> Vec<f64> {
    let mut wdot = vec![0.0; mech.n_species()];
    accumulate_production(rates, mech, &mut wdot);
    wdot
}

fn accumulate_production(rates: &[f64], mech: &Mechanism, wdot: &mut [f64]) {
    wdot.iter_mut().for_each(|w| *w = 0.0);
    for (rxn, &r) in mech.reactions().iter().zip(rates) {
        for &(i, c) in &rxn.reactants {
            wdot[i] -= c as f64 * r;
        }
        for &(i, c) in &rxn.products {
            wdot[i] += c as f64 * r;
        }
    }
}

/// `dy/dt` for the state vector `[T, Y_1, ..., Y_K]`.
pub fn rhs(state: &ThermoState, mech: &Mechanism, convention: ReverseRateConvention) -> Result<Vec<f64>, KineticsError> {
    let mut ev = SourceEval::new(mech, state.pressure, convention);
    let y = state.to_vector();
    let mut out = vec![0.0; y.len()];
    ev.rhs(&y, &mut out)?;
    Ok(out)
}

fn check_len(k: usize, mech: &Mechanism) -> Result<(), KineticsError> {
    if k != mech.n_species() {
        return Err(KineticsError::DimensionMismatch { expected: mech.n_species(), got: k });
    }
    Ok(())
}

/// Reusable evaluation of the chemical source terms, holding per-call scratch.
///
/// After [`SourceEval::evaluate`] the public fields describe the state last
/// evaluated.
#[derive(Debug, Clone)]
pub struct SourceEval<'m> {
    mech: &'m Mechanism,
    pressure: f64,
    convention: ReverseRateConvention,
    pub density: f64,
    pub concentrations: Vec<f64>,
    pub props: Vec<ThermoProps>,
    pub rates: Vec<f64>,
    pub production: Vec<f64>,
    /// Set when an Arrhenius or equilibrium exponent was clamped.
    pub saturated: bool,
}

impl<'m> SourceEval<'m> {
    pub fn new(mech: &'m Mechanism, pressure: f64, convention: ReverseRateConvention) -> Self {
        let k = mech.n_species();
        SourceEval {
            mech,
            pressure,
            convention,
            density: 0.0,
            concentrations: vec![0.0; k],
            props: Vec::with_capacity(k),
            rates: vec![0.0; mech.n_reactions()],
            production: vec![0.0; k],
            saturated: false,
        }
    }

    /// Fills density, concentrations, thermo, rates and production for `y`.
    pub fn evaluate(&mut self, y: &[f64]) -> Result<(), KineticsError> {
        let mech = self.mech;
        if y.len() != mech.n_species() + 1 {
            return Err(KineticsError::DimensionMismatch { expected: mech.n_species() + 1, got: y.len() });
        }
        let t = y[0];
        let ys = &y[1..];
        check_components(t, ys, self.pressure)?;
        self.saturated = false;
        self.density = density_raw(t, ys, self.pressure, mech)?;
        self.concentrations = concentrations_raw(self.density, ys, mech);
        self.props.clear();
        for sp in mech.species() {
            self.props.push(sp.thermo_props(t)?);
        }
        for (j, rxn) in mech.reactions().iter().enumerate() {
            let (f, sat_f) = rxn.forward.eval(t);
            let b = if !rxn.reversible {
                0.0
            } else if let Some(rev) = &rxn.explicit_reverse {
                let (b, sat_b) = rev.eval(t);
                self.saturated |= sat_b;
                b
            } else {
                let (kc, sat_k) = equilibrium_from_props(t, rxn, &self.props);
                self.saturated |= sat_k;
                reverse_rate(t, f, kc, rxn, self.convention)
            };
            self.saturated |= sat_f;
            let fwd = f * mass_action(&rxn.reactants, &self.concentrations);
            let rev = if b == 0.0 { 0.0 } else { b * mass_action(&rxn.products, &self.concentrations) };
            self.rates[j] = fwd - rev;
        }
        accumulate_production(&self.rates, mech, &mut self.production);
        Ok(())
    }

    /// Evaluates `dy/dt` into `out`.
    pub fn rhs(&mut self, y: &[f64], out: &mut [f64]) -> Result<(), KineticsError> {
        self.evaluate(y)?;
        let ys = &y[1..];
        let mut cp_mass = 0.0;
        let mut heat = 0.0;
        for (i, sp) in self.mech.species().iter().enumerate() {
            cp_mass += ys[i] * self.props[i].cp / sp.molar_mass;
            heat += self.production[i] * self.props[i].h;
        }
        out[0] = -heat / (self.density * cp_mass);
        for (i, sp) in self.mech.species().iter().enumerate() {
            out[i + 1] = self.production[i] * sp.molar_mass / self.density;
        }
        if let Some(index) = out.iter().position(|v| !v.is_finite()) {
            return Err(KineticsError::NonFinite { index });
        }
        Ok(())
    }
}

fn mass_action(stoich: &[(usize, u32)], conc: &[f64]) -> f64 {
    stoich.iter().map(|&(i, c)| conc[i].powi(c as i32)).product()
}
