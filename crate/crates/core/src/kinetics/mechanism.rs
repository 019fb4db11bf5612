//! Species, reactions and the validated mechanism that owns them.

use std::collections::HashSet;

use super::thermo::{Nasa7, ThermoProps};
use super::{KineticsError, GAS_CONSTANT};

/// Largest allowed `|sum (v'' - v') W|` per reaction, kg/mol.
pub const MASS_BALANCE_TOL: f64 = 1e-8;

/// Largest allowed relative mismatch of `c_p` between the two fit branches at `T_mid`.
pub const CP_CONTINUITY_TOL: f64 = 0.01;

/// Arguments of `exp` are clamped to this magnitude.
pub const EXP_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    /// Molar mass, kg/mol.
    pub molar_mass: f64,
    pub thermo: Nasa7,
}

impl Species {
    /// Molar `c_p`, `H` and `S` at `t`, or a range error naming the species.
    pub fn thermo_props(&self, t: f64) -> Result<ThermoProps, KineticsError> {
        if !self.thermo.in_range(t) {
            return Err(KineticsError::ThermoRange {
                species: self.name.clone(),
                temperature: t,
                t_low: self.thermo.t_low,
                t_high: self.thermo.t_high,
            });
        }
        Ok(self.thermo.eval_unchecked(t))
    }

    fn validate(&self) -> Result<(), KineticsError> {
        let bad = |reason: String| KineticsError::InvalidSpecies { name: self.name.clone(), reason };
        if self.name.is_empty() {
            return Err(bad("empty name".into()));
        }
        if !(self.molar_mass > 0.0 && self.molar_mass.is_finite()) {
            return Err(bad(format!("molar mass {} must be positive", self.molar_mass)));
        }
        let th = &self.thermo;
        if !(th.t_low < th.t_mid && th.t_mid < th.t_high) || !th.t_low.is_finite() || !th.t_high.is_finite() {
            return Err(bad(format!(
                "temperature ranges must satisfy T_low < T_mid < T_high (got {}, {}, {})",
                th.t_low, th.t_mid, th.t_high
            )));
        }
        if th.t_low <= 0.0 {
            return Err(bad("T_low must be positive".into()));
        }
        if th.low.iter().chain(th.high.iter()).any(|a| !a.is_finite()) {
            return Err(bad("non-finite thermo coefficient".into()));
        }
        let (lo, hi) = th.cp_at_mid();
        let scale = lo.abs().max(hi.abs());
        if !(lo.is_finite() && hi.is_finite()) || scale == 0.0 || (lo - hi).abs() > CP_CONTINUITY_TOL * scale {
            return Err(bad(format!("c_p discontinuous at T_mid: {lo} vs {hi}")));
        }
        Ok(())
    }
}

/// Modified Arrhenius triple `k = A T^beta exp(-E/(R T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrhenius {
    /// Pre-exponential factor, SI units consistent with the reaction order.
    pub a: f64,
    /// Temperature exponent.
    pub beta: f64,
    /// Activation energy, J/mol.
    pub e: f64,
}

impl Arrhenius {
    pub fn new(a: f64, beta: f64, e: f64) -> Self {
        Arrhenius { a, beta, e }
    }

    /// Rate constant and whether the exponent or the product had to be clamped.
    pub fn eval(&self, t: f64) -> (f64, bool) {
        let arg = -self.e / (GAS_CONSTANT * t);
        let mut saturated = arg.abs() > EXP_CLAMP;
        let arg = arg.clamp(-EXP_CLAMP, EXP_CLAMP);
        let power = if self.beta == 0.0 { 1.0 } else { t.powf(self.beta) };
        let mut k = self.a * power * arg.exp();
        if !k.is_finite() {
            saturated = true;
            k = f64::MAX;
        }
        (k, saturated)
    }

    fn is_valid(&self) -> bool {
        self.a > 0.0 && self.a.is_finite() && self.beta.is_finite() && self.e.is_finite()
    }
}

/// Stoichiometric coefficients as `(species index, coefficient)` pairs, sorted by index.
pub type Stoich = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub reactants: Stoich,
    pub products: Stoich,
    pub forward: Arrhenius,
    pub reversible: bool,
    /// Explicit reverse Arrhenius parameters; take precedence over the equilibrium route.
    pub explicit_reverse: Option<Arrhenius>,
}

impl Reaction {
    /// Builds a reaction, merging duplicate species entries and dropping zero coefficients.
    pub fn new(
        reactants: impl IntoIterator<Item = (usize, u32)>,
        products: impl IntoIterator<Item = (usize, u32)>,
        forward: Arrhenius,
        reversible: bool,
        explicit_reverse: Option<Arrhenius>,
    ) -> Self {
        Reaction {
            reactants: normalize_stoich(reactants),
            products: normalize_stoich(products),
            forward,
            reversible,
            explicit_reverse,
        }
    }

    /// Net stoichiometric coefficient `v'' - v'` of every participating species.
    pub fn net_stoich(&self) -> Vec<(usize, i64)> {
        let mut net: Vec<(usize, i64)> = Vec::new();
        for &(i, c) in &self.products {
            net.push((i, c as i64));
        }
        for &(i, c) in &self.reactants {
            match net.iter_mut().find(|(j, _)| *j == i) {
                Some(entry) => entry.1 -= c as i64,
                None => net.push((i, -(c as i64))),
            }
        }
        net.sort_by_key(|&(i, _)| i);
        net
    }

    /// Change in mole count, `sum (v'' - v')`.
    pub fn delta_moles(&self) -> i64 {
        self.net_stoich().iter().map(|&(_, c)| c).sum()
    }

    /// `sum (v'' - v') W`, kg/mol.
    pub fn mass_imbalance(&self, species: &[Species]) -> f64 {
        self.net_stoich()
            .iter()
            .map(|&(i, c)| c as f64 * species[i].molar_mass)
            .sum()
    }
}

fn normalize_stoich(entries: impl IntoIterator<Item = (usize, u32)>) -> Stoich {
    let mut out: Stoich = Vec::new();
    for (i, c) in entries {
        if c == 0 {
            continue;
        }
        match out.iter_mut().find(|(j, _)| *j == i) {
            Some(entry) => entry.1 = entry.1.saturating_add(c),
            None => out.push((i, c)),
        }
    }
    out.sort_by_key(|&(i, _)| i);
    out
}

/// Immutable, validated kinetic mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
}

impl Mechanism {
    pub fn new(species: Vec<Species>, reactions: Vec<Reaction>) -> Result<Self, KineticsError> {
        if species.is_empty() {
            return Err(KineticsError::EmptyMechanism);
        }
        let mut seen = HashSet::new();
        for sp in &species {
            sp.validate()?;
            if !seen.insert(sp.name.as_str()) {
                return Err(KineticsError::DuplicateSpecies(sp.name.clone()));
            }
        }
        let k = species.len();
        for (j, rxn) in reactions.iter().enumerate() {
            let invalid = |reason: String| KineticsError::InvalidReaction { index: j, reason };
            if rxn.reactants.is_empty() && rxn.products.is_empty() {
                return Err(invalid("no participating species".into()));
            }
            if let Some(&(i, _)) = rxn.reactants.iter().chain(rxn.products.iter()).find(|(i, _)| *i >= k) {
                return Err(invalid(format!("species index {i} out of range (K = {k})")));
            }
            if !rxn.forward.is_valid() {
                return Err(invalid(format!("invalid forward Arrhenius parameters {:?}", rxn.forward)));
            }
            if let Some(rev) = &rxn.explicit_reverse {
                if !rxn.reversible {
                    return Err(invalid("explicit reverse parameters on an irreversible reaction".into()));
                }
                if !rev.is_valid() {
                    return Err(invalid(format!("invalid reverse Arrhenius parameters {rev:?}")));
                }
            }
            let imbalance = rxn.mass_imbalance(&species);
            if imbalance.abs() > MASS_BALANCE_TOL {
                return Err(KineticsError::MassImbalance { index: j, imbalance });
            }
        }
        Ok(Mechanism { species, reactions })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Species count `K`.
    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    /// Reaction count `N`.
    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn molar_masses(&self) -> Vec<f64> {
        self.species.iter().map(|s| s.molar_mass).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(name: &str, w: f64) -> Species {
        Species {
            name: name.into(),
            molar_mass: w,
            thermo: Nasa7::single_range(200.0, 1000.0, 5000.0, [3.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        }
    }

    #[test]
    fn arrhenius_degenerate_cases() {
        assert_eq!(Arrhenius::new(5.0, 0.0, 0.0).eval(1234.0).0, 5.0);
        assert_eq!(Arrhenius::new(1.0, 1.0, 0.0).eval(300.0).0, 300.0);
        let (k, sat) = Arrhenius::new(1.0, 0.0, GAS_CONSTANT * 1000.0).eval(1000.0);
        assert_eq!(k, (-1.0f64).exp());
        assert!(!sat);
    }

    #[test]
    fn arrhenius_clamps_exponent() {
        let (k, sat) = Arrhenius::new(1.0, 0.0, 1e9).eval(10.0);
        assert!(sat);
        assert_eq!(k, (-EXP_CLAMP).exp());
        let (k, sat) = Arrhenius::new(1e300, 2.0, -1e7).eval(1000.0);
        assert!(sat);
        assert_eq!(k, f64::MAX);
    }

    #[test]
    fn arrhenius_monotone_in_temperature() {
        let arr = Arrhenius::new(3.0e8, 0.5, 1.5e5);
        let mut prev = 0.0;
        for i in 1..50 {
            let k = arr.eval(100.0 * i as f64).0;
            assert!(k > prev);
            prev = k;
        }
    }

    #[test]
    fn rejects_bad_mechanisms() {
        let rxn = |r: Vec<(usize, u32)>, p: Vec<(usize, u32)>| {
            Reaction::new(r, p, Arrhenius::new(1.0, 0.0, 0.0), false, None)
        };
        assert!(matches!(Mechanism::new(vec![], vec![]), Err(KineticsError::EmptyMechanism)));
        assert!(matches!(
            Mechanism::new(vec![sp("A", 0.01), sp("A", 0.02)], vec![]),
            Err(KineticsError::DuplicateSpecies(_))
        ));
        assert!(matches!(
            Mechanism::new(vec![sp("A", 0.01), sp("B", 0.02)], vec![rxn(vec![(0, 1)], vec![(1, 1)])]),
            Err(KineticsError::MassImbalance { index: 0, .. })
        ));
        assert!(matches!(
            Mechanism::new(vec![sp("A", 0.01)], vec![rxn(vec![(0, 1)], vec![(3, 1)])]),
            Err(KineticsError::InvalidReaction { index: 0, .. })
        ));
        assert!(matches!(
            Mechanism::new(vec![sp("A", -0.01)], vec![]),
            Err(KineticsError::InvalidSpecies { .. })
        ));
        let mut bad_thermo = sp("A", 0.01);
        bad_thermo.thermo.high[0] = 3.6;
        assert!(matches!(Mechanism::new(vec![bad_thermo], vec![]), Err(KineticsError::InvalidSpecies { .. })));
    }

    #[test]
    fn balanced_mechanism_is_accepted() {
        let mech = Mechanism::new(
            vec![sp("A", 0.01), sp("B", 0.02)],
            vec![Reaction::new([(0, 2)], [(1, 1)], Arrhenius::new(2.0, 0.0, 0.0), true, None)],
        )
        .unwrap();
        assert_eq!(mech.n_species(), 2);
        assert_eq!(mech.n_reactions(), 1);
        assert_eq!(mech.reactions()[0].delta_moles(), -1);
        assert_eq!(mech.species_index("B"), Some(1));
    }
}
