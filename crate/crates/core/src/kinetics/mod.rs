//! Source terms of a spatially homogeneous, isobaric ideal-gas reactor.
//!
//! All quantities are SI: K, Pa, kg/mol, mol/m^3, J/mol, s. The state vector
//! is ordered temperature first, then the species mass fractions in mechanism
//! order.

mod jacobian;
mod mechanism;
mod reactor;
mod source;
mod state;
mod thermo;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use jacobian::{fd_jacobian, fd_step};
pub use mechanism::{
    Arrhenius, Mechanism, Reaction, Species, Stoich, CP_CONTINUITY_TOL, EXP_CLAMP, MASS_BALANCE_TOL,
};
pub use reactor::IsobaricReactor;
pub use source::{
    concentrations, density, equilibrium_constant, forward_rate, mean_molar_mass, production_rates,
    reaction_rates, reverse_rate, rhs, SourceEval,
};
pub use state::{ThermoState, MASS_FRACTION_EPS};
pub use thermo::{Nasa7, Nasa7Coeffs, ThermoProps};

/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314462618;

/// Standard-state pressure used for `K_p -> K_c`, Pa.
pub const STANDARD_PRESSURE: f64 = 1.0e5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticsError {
    #[error("temperature {temperature} K outside thermo range [{t_low}, {t_high}] of species {species}")]
    ThermoRange {
        species: String,
        temperature: f64,
        t_low: f64,
        t_high: f64,
    },
    #[error("species {name}: {reason}")]
    InvalidSpecies { name: String, reason: String },
    #[error("duplicate species name {0}")]
    DuplicateSpecies(String),
    #[error("mechanism has no species")]
    EmptyMechanism,
    #[error("reaction {index}: {reason}")]
    InvalidReaction { index: usize, reason: String },
    #[error("reaction {index} violates mass balance by {imbalance:e} kg/mol")]
    MassImbalance { index: usize, imbalance: f64 },
    #[error("invalid state at component {index}: {reason}")]
    InvalidState { index: usize, reason: String },
    #[error("non-finite value at component {index}")]
    NonFinite { index: usize },
    #[error("state length {got} does not match mechanism (expected {expected})")]
    DimensionMismatch { expected: usize, got: usize },
}

/// How the reverse rate constant is obtained from the equilibrium constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReverseRateConvention {
    /// `b = f / K_c` (detailed balance).
    #[default]
    Divide,
    /// `b = f * K_c`.
    Multiply,
}

impl FromStr for ReverseRateConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "divide" => Ok(ReverseRateConvention::Divide),
            "multiply" => Ok(ReverseRateConvention::Multiply),
            other => Err(format!("unknown reverse-rate convention '{other}' (expected divide|multiply)")),
        }
    }
}

impl fmt::Display for ReverseRateConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReverseRateConvention::Divide => "divide",
            ReverseRateConvention::Multiply => "multiply",
        })
    }
}
