//! Mechanism and run-config text formats and CSV result tables.

mod config;
mod lexer;
mod mechanism;
mod tables;

use thiserror::Error;

pub use config::{parse_config, OutputConfig, RunConfig, SweepPlan, DEFAULT_PRESSURE, MASS_FRACTION_SUM_TOL};
pub use lexer::format_f64;
pub use mechanism::{check_species_name, parse_mechanism, serialize_mechanism, MAX_STOICH, MECHANISM_FORMAT_VERSION};
pub use tables::{
    read_csv, read_solution, solution_header, write_csv, write_solution, CsvError, CsvRow, SpectrumRow, StepRow,
    SweepRow,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown species '{0}'")]
    UnknownSpecies(String),
    #[error("duplicate species '{0}'")]
    DuplicateSpecies(String),
    #[error("reaction does not conserve mass (imbalance {0:e} kg/mol)")]
    MassImbalance(f64),
    #[error("malformed Arrhenius parameters: {0}")]
    MalformedArrhenius(String),
    #[error("unsupported reaction type: {0}")]
    UnsupportedReaction(String),
    #[error("malformed species record: {0}")]
    MalformedSpecies(String),
    #[error("invalid species data: {0}")]
    InvalidSpecies(String),
    #[error("malformed reaction: {0}")]
    MalformedReaction(String),
    #[error("'{0}' is not a finite number")]
    InvalidNumber(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("record outside any section")]
    OutsideSection,
    #[error("unsupported format version '{0}'")]
    UnsupportedVersion(String),
    #[error("no species declared")]
    EmptyMechanism,
    #[error("{0}")]
    Syntax(String),
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("missing required key '{0}'")]
    MissingKey(String),
    #[error("invalid value for '{key}': {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("mass fractions sum to {0}, expected 1 within 1e-6")]
    MassFractionSum(f64),
}

/// Parse diagnostic with a 1-based position.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind} [{}]", self.code())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, line: usize, column: usize) -> Self {
        ParseError { kind, line, column }
    }

    /// Stable machine-readable code, distinct per kind.
    pub fn code(&self) -> &'static str {
        use ParseErrorKind::*;
        match self.kind {
            UnknownSpecies(_) => "unknown-species",
            DuplicateSpecies(_) => "duplicate-species",
            MassImbalance(_) => "mass-imbalance",
            MalformedArrhenius(_) => "malformed-arrhenius",
            UnsupportedReaction(_) => "unsupported-reaction",
            MalformedSpecies(_) => "malformed-species",
            InvalidSpecies(_) => "invalid-species",
            MalformedReaction(_) => "malformed-reaction",
            InvalidNumber(_) => "invalid-number",
            UnknownSection(_) => "unknown-section",
            OutsideSection => "outside-section",
            UnsupportedVersion(_) => "unsupported-version",
            EmptyMechanism => "empty-mechanism",
            Syntax(_) => "syntax",
            UnknownKey(_) => "unknown-key",
            DuplicateKey(_) => "duplicate-key",
            MissingKey(_) => "missing-key",
            InvalidValue { .. } => "invalid-value",
            MassFractionSum(_) => "mass-fraction-sum",
        }
    }
}
