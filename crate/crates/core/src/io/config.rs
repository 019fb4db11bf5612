//! Run configuration files: `key = value` records in named sections.

use std::collections::HashSet;
use std::path::PathBuf;

use super::lexer::{lines, parse_f64, Line, Token};
use super::mechanism::check_species_name;
use super::{ParseError, ParseErrorKind};
use crate::integrator::{ClampMode, ControllerConfig, Method, PhiSettings, SolverOptions};
use crate::kinetics::{Mechanism, ReverseRateConvention};

/// Allowed `|sum Y - 1|` before renormalization.
pub const MASS_FRACTION_SUM_TOL: f64 = 1e-6;

/// Default pressure, Pa.
pub const DEFAULT_PRESSURE: f64 = 101_325.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Output directory; relative paths resolve against the working directory.
    pub dir: Option<PathBuf>,
    /// Uniformly spaced solution samples; zero writes every accepted step.
    pub samples: usize,
}

/// Tolerance pairs of a precision sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// `(atol, rtol)` of the reference run.
    pub reference: (f64, f64),
    /// `(atol, rtol)` per sweep point, in the given order.
    pub points: Vec<(f64, f64)>,
}

impl SweepPlan {
    /// The reference must be at least as tight as every point in both components.
    pub fn validate(&self) -> Result<(), String> {
        let (ra, rr) = self.reference;
        if !(ra > 0.0 && rr > 0.0) {
            return Err(format!("reference tolerances must be positive, got ({ra:e}, {rr:e})"));
        }
        for &(a, r) in &self.points {
            if !(a > 0.0 && r > 0.0) {
                return Err(format!("sweep tolerances must be positive, got ({a:e}, {r:e})"));
            }
            if a < ra || r < rr {
                return Err(format!("sweep point ({a:e}, {r:e}) is tighter than the reference ({ra:e}, {rr:e})"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Mechanism path as written; relative to the config file's directory.
    pub mechanism: PathBuf,
    /// Initial temperature, K.
    pub temperature: f64,
    /// Pressure, Pa.
    pub pressure: f64,
    /// Integration end time, s (start is 0).
    pub t_final: f64,
    /// Initial mass fractions as written, in file order.
    pub mass_fractions: Vec<(String, f64)>,
    /// Species that absorbs `1 - sum(others)`.
    pub balance: Option<String>,
    pub method: Method,
    pub reverse_rate: ReverseRateConvention,
    pub controller: ControllerConfig,
    pub phi: PhiSettings,
    pub max_steps: usize,
    pub output: OutputConfig,
    pub sweep: Option<SweepPlan>,
}

impl RunConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            controller: self.controller,
            phi: self.phi,
            method: self.method,
            max_steps: self.max_steps,
            output_times: self.sample_times(),
        }
    }

    /// Uniform output times, empty when every accepted step is written.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.output.samples;
        if n == 0 {
            return Vec::new();
        }
        (0..=n).map(|i| if i == n { self.t_final } else { self.t_final * i as f64 / n as f64 }).collect()
    }

    /// Initial `[T, Y_1..Y_K]` in mechanism order, renormalized to sum exactly to one.
    pub fn initial_state(&self, mech: &Mechanism) -> Result<Vec<f64>, String> {
        let k = mech.n_species();
        let mut y = vec![0.0; k];
        for (name, v) in &self.mass_fractions {
            let i = mech.species_index(name).ok_or_else(|| format!("mass fraction for unknown species '{name}'"))?;
            y[i] = *v;
        }
        if let Some(b) = &self.balance {
            let i = mech.species_index(b).ok_or_else(|| format!("balance species '{b}' not in mechanism"))?;
            let others: f64 = y.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
            if others > 1.0 {
                return Err(format!("mass fractions other than '{b}' already sum to {others}"));
            }
            y[i] = 1.0 - others;
        }
        let sum: f64 = y.iter().sum();
        if (sum - 1.0).abs() > MASS_FRACTION_SUM_TOL {
            return Err(format!("mass fractions sum to {sum}, expected 1"));
        }
        let mut state = Vec::with_capacity(k + 1);
        state.push(self.temperature);
        state.extend(y.iter().map(|v| v / sum));
        Ok(state)
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Section {
    None,
    Run,
    MassFractions,
    Controller,
    Kiops,
    Output,
    Sweep,
}

struct Entry<'a> {
    key: Token<'a>,
    values: Vec<Token<'a>>,
}

fn split_entry<'a>(line: &Line<'a>) -> Result<Entry<'a>, ParseError> {
    let Some(eq) = line.content.find('=') else {
        let col = line.content.len() - line.content.trim_start().len() + 1;
        return Err(line.error(ParseErrorKind::Syntax("expected 'key = value'".into()), col));
    };
    let key_line = Line { number: line.number, content: &line.content[..eq] };
    let keys = key_line.tokens();
    let eq_col = line.content[..eq].chars().count() + 1;
    if keys.len() != 1 {
        return Err(line.error(ParseErrorKind::Syntax("expected a single key before '='".into()), keys.first().map_or(eq_col, |t| t.column)));
    }
    let value_line = Line { number: line.number, content: &line.content[eq + 1..] };
    let values: Vec<Token<'a>> = value_line
        .tokens()
        .into_iter()
        .map(|t| Token { text: t.text, column: t.column + eq_col })
        .collect();
    if values.is_empty() {
        return Err(line.error(ParseErrorKind::InvalidValue { key: keys[0].text.to_string(), reason: "missing value".into() }, eq_col));
    }
    Ok(Entry { key: keys[0], values })
}

fn invalid(line: usize, tok: &Token<'_>, key: &str, reason: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::InvalidValue { key: key.to_string(), reason: reason.into() }, line, tok.column)
}

fn single<'a>(e: &Entry<'a>, line: usize) -> Result<Token<'a>, ParseError> {
    match e.values.as_slice() {
        [v] => Ok(*v),
        _ => Err(invalid(line, &e.values[1], e.key.text, "expected a single value")),
    }
}

fn number(e: &Entry<'_>, line: usize) -> Result<f64, ParseError> {
    let tok = single(e, line)?;
    parse_f64(&tok, line)
}

fn positive(e: &Entry<'_>, line: usize) -> Result<f64, ParseError> {
    let v = number(e, line)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(line, &e.values[0], e.key.text, format!("{v} must be positive")))
    }
}

fn count(e: &Entry<'_>, line: usize) -> Result<usize, ParseError> {
    let tok = single(e, line)?;
    tok.text.parse().map_err(|_| invalid(line, &tok, e.key.text, "expected a non-negative integer"))
}

fn pair(e: &Entry<'_>, line: usize) -> Result<(f64, f64), ParseError> {
    match e.values.as_slice() {
        [a, r] => {
            let (a, r) = (parse_f64(a, line)?, parse_f64(r, line)?);
            if a > 0.0 && r > 0.0 {
                Ok((a, r))
            } else {
                Err(invalid(line, &e.values[0], e.key.text, "tolerances must be positive"))
            }
        }
        _ => Err(invalid(line, &e.values[0], e.key.text, "expected 'atol rtol'")),
    }
}

fn word<T: std::str::FromStr<Err = String>>(e: &Entry<'_>, line: usize) -> Result<T, ParseError> {
    let tok = single(e, line)?;
    tok.text.parse().map_err(|m: String| invalid(line, &tok, e.key.text, m))
}

/// Parses a run configuration. Mass fractions are checked for their sum here;
/// species names are resolved later against the mechanism.
pub fn parse_config(text: &str) -> Result<RunConfig, ParseError> {
    let mut section = Section::None;
    let mut seen: HashSet<(u8, String)> = HashSet::new();
    let mut mechanism = None;
    let mut temperature = None;
    let mut t_final = None;
    let mut pressure = DEFAULT_PRESSURE;
    let mut mass_fractions: Vec<(String, f64)> = Vec::new();
    let mut mf_line = 0;
    let mut balance = None;
    let mut method = Method::default();
    let mut reverse_rate = ReverseRateConvention::default();
    let mut controller = ControllerConfig::default();
    let mut controller_line = 0;
    let mut phi = PhiSettings::default();
    let mut max_steps = SolverOptions::default().max_steps;
    let mut output = OutputConfig { dir: None, samples: 0 };
    let mut reference = None;
    let mut points = Vec::new();
    let mut sweep_line = 0;
    let mut last_line = 1;

    for line in lines(text) {
        last_line = line.number;
        if line.is_blank() {
            continue;
        }
        if let Some(name) = line.section() {
            let name = name?;
            section = match name {
                "run" => Section::Run,
                "mass_fractions" => Section::MassFractions,
                "controller" => Section::Controller,
                "kiops" => Section::Kiops,
                "output" => Section::Output,
                "sweep" => Section::Sweep,
                other => return Err(line.error(ParseErrorKind::UnknownSection(other.to_string()), 1)),
            };
            match section {
                Section::MassFractions => mf_line = line.number,
                Section::Controller => controller_line = line.number,
                Section::Sweep => sweep_line = line.number,
                _ => {}
            }
            continue;
        }
        if section == Section::None {
            let toks = line.tokens();
            if toks[0].text == "format" && toks.len() == 2 && toks[1].text == "1" {
                continue;
            }
            if toks[0].text == "format" {
                let tok = toks.get(1).unwrap_or(&toks[0]);
                return Err(line.error(ParseErrorKind::UnsupportedVersion(tok.text.to_string()), tok.column));
            }
            return Err(line.error(ParseErrorKind::OutsideSection, toks[0].column));
        }
        let e = split_entry(&line)?;
        let key = e.key.text;
        let n = line.number;
        let repeatable = section == Section::Sweep && key == "point";
        if !repeatable && !seen.insert((section as u8, key.to_string())) {
            return Err(line.error(ParseErrorKind::DuplicateKey(key.to_string()), e.key.column));
        }
        let unknown = || line.error(ParseErrorKind::UnknownKey(key.to_string()), e.key.column);
        match section {
            Section::None => unreachable!("handled above"),
            Section::Run => match key {
                "mechanism" => mechanism = Some(PathBuf::from(single(&e, n)?.text)),
                "temperature" => temperature = Some(positive(&e, n)?),
                "pressure" => pressure = positive(&e, n)?,
                "t_final" => t_final = Some(positive(&e, n)?),
                "method" => method = word(&e, n)?,
                "reverse_rate" => reverse_rate = word(&e, n)?,
                _ => return Err(unknown()),
            },
            Section::MassFractions => {
                if key == "balance" {
                    let tok = single(&e, n)?;
                    check_species_name(tok.text).map_err(|m| invalid(n, &tok, key, m))?;
                    balance = Some(tok.text.to_string());
                } else {
                    check_species_name(key).map_err(|m| invalid(n, &e.key, key, m))?;
                    let v = number(&e, n)?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(invalid(n, &e.values[0], key, format!("mass fraction {v} outside [0, 1]")));
                    }
                    mass_fractions.push((key.to_string(), v));
                }
            }
            Section::Controller => match key {
                "atol" => controller.atol = positive(&e, n)?,
                "rtol" => controller.rtol = positive(&e, n)?,
                "safety" => controller.safety = positive(&e, n)?,
                "facmin" => controller.facmin = positive(&e, n)?,
                "facmax" => controller.facmax = positive(&e, n)?,
                "order" => {
                    let q = count(&e, n)?;
                    controller.order = u32::try_from(q).map_err(|_| invalid(n, &e.values[0], key, "order too large"))?;
                }
                "h0" => controller.h0 = Some(positive(&e, n)?),
                "h_min" => controller.h_min = positive(&e, n)?,
                "clamp_mode" => controller.clamp_mode = word::<ClampMode>(&e, n)?,
                "max_steps" => max_steps = count(&e, n)?,
                _ => return Err(unknown()),
            },
            Section::Kiops => match key {
                "tol" => phi.tol = positive(&e, n)?,
                "m_init" => phi.options.m_init = count(&e, n)?.max(1),
                "m_max" => phi.options.m_max = count(&e, n)?.max(1),
                "min_substep" => phi.options.min_substep = positive(&e, n)?,
                _ => return Err(unknown()),
            },
            Section::Output => match key {
                "dir" => output.dir = Some(PathBuf::from(single(&e, n)?.text)),
                "samples" => output.samples = count(&e, n)?,
                _ => return Err(unknown()),
            },
            Section::Sweep => match key {
                "reference" => reference = Some(pair(&e, n)?),
                "point" => points.push(pair(&e, n)?),
                _ => return Err(unknown()),
            },
        }
    }

    let missing = |k: &str| ParseError::new(ParseErrorKind::MissingKey(k.to_string()), last_line, 1);
    let mechanism = mechanism.ok_or_else(|| missing("run.mechanism"))?;
    let temperature = temperature.ok_or_else(|| missing("run.temperature"))?;
    let t_final = t_final.ok_or_else(|| missing("run.t_final"))?;
    if mass_fractions.is_empty() && balance.is_none() {
        return Err(missing("mass_fractions"));
    }
    if let Some(b) = &balance {
        let others: f64 = mass_fractions.iter().filter(|(name, _)| name != b).map(|(_, v)| v).sum();
        if others > 1.0 + MASS_FRACTION_SUM_TOL {
            return Err(ParseError::new(ParseErrorKind::MassFractionSum(others), mf_line, 1));
        }
    } else {
        let sum: f64 = mass_fractions.iter().map(|(_, v)| v).sum();
        if (sum - 1.0).abs() > MASS_FRACTION_SUM_TOL {
            return Err(ParseError::new(ParseErrorKind::MassFractionSum(sum), mf_line, 1));
        }
    }
    controller.validate().map_err(|m| {
        ParseError::new(ParseErrorKind::InvalidValue { key: "controller".into(), reason: m }, controller_line.max(1), 1)
    })?;
    let sweep = match (reference, points.is_empty()) {
        (Some(reference), _) => {
            let plan = SweepPlan { reference, points };
            plan.validate().map_err(|m| {
                ParseError::new(ParseErrorKind::InvalidValue { key: "sweep".into(), reason: m }, sweep_line, 1)
            })?;
            Some(plan)
        }
        (None, false) => return Err(ParseError::new(ParseErrorKind::MissingKey("sweep.reference".into()), sweep_line, 1)),
        (None, true) => None,
    };

    Ok(RunConfig {
        mechanism,
        temperature,
        pressure,
        t_final,
        mass_fractions,
        balance,
        method,
        reverse_rate,
        controller,
        phi,
        max_steps,
        output,
        sweep,
    })
}
