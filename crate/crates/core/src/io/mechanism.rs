//! Line-oriented mechanism files.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::lexer::{format_f64, lines, parse_f64, Line, Token};
use super::{ParseError, ParseErrorKind};
use crate::kinetics::{Arrhenius, KineticsError, Mechanism, Nasa7, Reaction, Species};

/// Format version written by [`serialize_mechanism`] and accepted by [`parse_mechanism`].
pub const MECHANISM_FORMAT_VERSION: u32 = 1;

/// Largest stoichiometric coefficient accepted.
pub const MAX_STOICH: u32 = 1000;

const FORBIDDEN_NAME_CHARS: &[char] = &['+', '=', '<', '>', '|', '#', '[', ']', ':', '(', ')', ',', '/'];

#[derive(PartialEq)]
enum Section {
    None,
    Species,
    Reactions,
}

/// Checks a species name; returns a reason on failure.
pub fn check_species_name(name: &str) -> Result<(), String> {
    let first = name.chars().next().ok_or("empty name")?;
    if first.is_ascii_digit() || matches!(first, '-' | '.') {
        return Err(format!("species name '{name}' must not start with a digit, '-' or '.'"));
    }
    if let Some(c) = name.chars().find(|c| FORBIDDEN_NAME_CHARS.contains(c) || c.is_whitespace()) {
        return Err(format!("species name '{name}' contains '{c}'"));
    }
    Ok(())
}

/// Parses a mechanism and validates it against every kinetics invariant.
pub fn parse_mechanism(text: &str) -> Result<Mechanism, ParseError> {
    let mut section = Section::None;
    let mut species: Vec<Species> = Vec::new();
    let mut species_lines: Vec<usize> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut reaction_lines: Vec<usize> = Vec::new();
    let mut seen_version = false;
    let mut last_line = 0;

    for line in lines(text) {
        last_line = line.number;
        if line.is_blank() {
            continue;
        }
        if let Some(name) = line.section() {
            let name = name?;
            section = match name {
                "species" if reactions.is_empty() && species.is_empty() => Section::Species,
                "reactions" => Section::Reactions,
                "species" => {
                    return Err(line.error(ParseErrorKind::Syntax("[species] must precede [reactions] and appear once".into()), 1))
                }
                other => return Err(line.error(ParseErrorKind::UnknownSection(other.to_string()), 1)),
            };
            continue;
        }
        let tokens = line.tokens();
        match section {
            Section::None => {
                if tokens[0].text == "format" && !seen_version {
                    parse_version(&line, &tokens)?;
                    seen_version = true;
                } else {
                    return Err(line.error(ParseErrorKind::OutsideSection, tokens[0].column));
                }
            }
            Section::Species => {
                let sp = parse_species(&line, &tokens)?;
                if index.contains_key(&sp.name) {
                    return Err(line.error(ParseErrorKind::DuplicateSpecies(sp.name), tokens[0].column));
                }
                index.insert(sp.name.clone(), species.len());
                species.push(sp);
                species_lines.push(line.number);
            }
            Section::Reactions => {
                reactions.push(parse_reaction(&line, &tokens, &index)?);
                reaction_lines.push(line.number);
            }
        }
    }

    // Errors without a natural position point at the last line.
    let end = last_line.max(1);
    Mechanism::new(species, reactions).map_err(|e| match e {
        KineticsError::EmptyMechanism => ParseError::new(ParseErrorKind::EmptyMechanism, end, 1),
        KineticsError::InvalidSpecies { name, reason } => {
            let line = index.get(&name).map_or(end, |&i| species_lines[i]);
            ParseError::new(ParseErrorKind::InvalidSpecies(format!("{name}: {reason}")), line, 1)
        }
        KineticsError::DuplicateSpecies(name) => ParseError::new(ParseErrorKind::DuplicateSpecies(name), end, 1),
        KineticsError::MassImbalance { index, imbalance } => {
            ParseError::new(ParseErrorKind::MassImbalance(imbalance), reaction_lines[index], 1)
        }
        KineticsError::InvalidReaction { index, reason } => {
            ParseError::new(ParseErrorKind::MalformedReaction(reason), reaction_lines[index], 1)
        }
        other => ParseError::new(ParseErrorKind::Syntax(other.to_string()), end, 1),
    })
}

fn parse_version(line: &Line<'_>, tokens: &[Token<'_>]) -> Result<(), ParseError> {
    match tokens {
        [_, v] if v.text.parse::<u32>() == Ok(MECHANISM_FORMAT_VERSION) => Ok(()),
        [_, v] => Err(line.error(ParseErrorKind::UnsupportedVersion(v.text.to_string()), v.column)),
        _ => Err(line.error(ParseErrorKind::Syntax("expected 'format <version>'".into()), tokens[0].column)),
    }
}

fn parse_coeffs(line: &Line<'_>, tokens: &[Token<'_>]) -> Result<[f64; 7], ParseError> {
    let mut out = [0.0; 7];
    for (slot, tok) in out.iter_mut().zip(tokens) {
        *slot = parse_f64(tok, line.number)?;
    }
    Ok(out)
}

fn parse_species(line: &Line<'_>, tokens: &[Token<'_>]) -> Result<Species, ParseError> {
    let malformed = |msg: String, col: usize| line.error(ParseErrorKind::MalformedSpecies(msg), col);
    let name = tokens[0];
    check_species_name(name.text).map_err(|m| malformed(m, name.column))?;
    let bars: Vec<usize> = tokens.iter().enumerate().filter(|(_, t)| t.text == "|").map(|(i, _)| i).collect();
    let header = &tokens[1..bars.first().copied().unwrap_or(tokens.len())];
    if header.len() != 4 {
        return Err(malformed(
            format!("expected 'name W T_low T_mid T_high | a1..a7 [| a1..a7]', found {} header fields", header.len()),
            name.column,
        ));
    }
    let mut nums = [0.0; 4];
    for (slot, tok) in nums.iter_mut().zip(header) {
        *slot = parse_f64(tok, line.number)?;
    }
    let group = |from: usize, to: usize| -> Result<[f64; 7], ParseError> {
        let g = &tokens[from..to];
        if g.len() != 7 {
            let col = tokens.get(from).or(tokens.get(from - 1)).map_or(1, |t| t.column);
            return Err(malformed(format!("expected 7 coefficients, found {}", g.len()), col));
        }
        parse_coeffs(line, g)
    };
    let thermo = match bars.as_slice() {
        [b] => Nasa7::single_range(nums[1], nums[2], nums[3], group(b + 1, tokens.len())?),
        [b1, b2] => Nasa7 {
            t_low: nums[1],
            t_mid: nums[2],
            t_high: nums[3],
            low: group(b1 + 1, *b2)?,
            high: group(b2 + 1, tokens.len())?,
        },
        _ => return Err(malformed(format!("expected 1 or 2 coefficient groups, found {}", bars.len()), name.column)),
    };
    Ok(Species { name: name.text.to_string(), molar_mass: nums[0], thermo })
}

fn parse_side<'a>(
    line: &Line<'_>,
    tokens: &[Token<'a>],
    pos: &mut usize,
    index: &HashMap<String, usize>,
) -> Result<Vec<(usize, u32)>, ParseError> {
    let mut out = Vec::new();
    loop {
        let Some(tok) = tokens.get(*pos) else {
            let col = tokens.last().map_or(1, |t| t.column);
            return Err(line.error(ParseErrorKind::MalformedReaction("expected a species".into()), col));
        };
        let mut coeff = 1;
        let mut name_tok = *tok;
        if tok.text.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            coeff = match tok.text.parse::<u32>() {
                Ok(c) if (1..=MAX_STOICH).contains(&c) => c,
                _ => {
                    return Err(line.error(
                        ParseErrorKind::MalformedReaction(format!(
                            "stoichiometric coefficient '{}' must be an integer in 1..={MAX_STOICH}",
                            tok.text
                        )),
                        tok.column,
                    ))
                }
            };
            *pos += 1;
            name_tok = *tokens.get(*pos).ok_or_else(|| {
                line.error(ParseErrorKind::MalformedReaction("coefficient without species".into()), tok.column)
            })?;
        }
        let name = name_tok.text;
        match index.get(name) {
            Some(&i) => out.push((i, coeff)),
            None if name == "M" => {
                return Err(line.error(ParseErrorKind::UnsupportedReaction("third-body 'M'".into()), name_tok.column))
            }
            None if check_species_name(name).is_err() => {
                return Err(line.error(
                    ParseErrorKind::MalformedReaction(format!("unexpected token '{name}'")),
                    name_tok.column,
                ))
            }
            None => return Err(line.error(ParseErrorKind::UnknownSpecies(name.to_string()), name_tok.column)),
        }
        *pos += 1;
        match tokens.get(*pos) {
            Some(t) if t.text == "+" => *pos += 1,
            _ => return Ok(out),
        }
    }
}

fn parse_arrhenius(line: &Line<'_>, tokens: &[Token<'_>], anchor: usize) -> Result<Arrhenius, ParseError> {
    if tokens.len() != 3 {
        let col = tokens.first().map_or(anchor, |t| t.column);
        return Err(line.error(
            ParseErrorKind::MalformedArrhenius(format!("expected 'A beta E', found {} fields", tokens.len())),
            col,
        ));
    }
    let mut v = [0.0; 3];
    for (slot, tok) in v.iter_mut().zip(tokens) {
        *slot = parse_f64(tok, line.number).map_err(|_| {
            line.error(ParseErrorKind::MalformedArrhenius(format!("'{}' is not a finite number", tok.text)), tok.column)
        })?;
    }
    if v[0] <= 0.0 {
        return Err(line.error(ParseErrorKind::MalformedArrhenius(format!("A = {} must be positive", v[0])), tokens[0].column));
    }
    Ok(Arrhenius::new(v[0], v[1], v[2]))
}

fn parse_reaction(line: &Line<'_>, tokens: &[Token<'_>], index: &HashMap<String, usize>) -> Result<Reaction, ParseError> {
    if let Some(t) = tokens.iter().find(|t| t.text.contains('/') || t.text.eq_ignore_ascii_case("DUPLICATE")) {
        return Err(line.error(ParseErrorKind::UnsupportedReaction(format!("auxiliary keyword '{}'", t.text)), t.column));
    }
    if let Some(t) = tokens.iter().find(|t| t.text.starts_with("(+")) {
        return Err(line.error(ParseErrorKind::UnsupportedReaction(format!("falloff term '{}'", t.text)), t.column));
    }
    let arrow = tokens.iter().position(|t| t.text == "=>" || t.text == "<=>");
    let Some(arrow) = arrow else {
        let col = tokens.iter().find(|t| t.text.contains('=')).map_or(tokens[0].column, |t| t.column);
        return Err(line.error(ParseErrorKind::MalformedReaction("expected whitespace-separated '=>' or '<=>'".into()), col));
    };
    let reversible = tokens[arrow].text == "<=>";
    let mut pos = 0;
    let reactants = parse_side(line, &tokens[..arrow], &mut pos, index)?;
    if pos != arrow {
        return Err(line.error(
            ParseErrorKind::MalformedReaction(format!("unexpected token '{}' before arrow", tokens[pos].text)),
            tokens[pos].column,
        ));
    }
    let rest = &tokens[arrow + 1..];
    let mut pos = 0;
    let products = parse_side(line, rest, &mut pos, index)?;
    let numbers = &rest[pos..];
    let rev_at = numbers.iter().position(|t| t.text == "rev:");
    let (fwd_toks, rev_toks) = match rev_at {
        Some(i) => (&numbers[..i], Some(&numbers[i + 1..])),
        None => (numbers, None),
    };
    let anchor = tokens.last().map_or(1, |t| t.column);
    let forward = parse_arrhenius(line, fwd_toks, anchor)?;
    let explicit_reverse = match rev_toks {
        Some(r) => {
            if !reversible {
                let col = numbers[rev_at.unwrap_or(0)].column;
                return Err(line.error(
                    ParseErrorKind::MalformedReaction("'rev:' parameters on an irreversible reaction".into()),
                    col,
                ));
            }
            Some(parse_arrhenius(line, r, anchor)?)
        }
        None => None,
    };
    Ok(Reaction::new(reactants, products, forward, reversible, explicit_reverse))
}

fn write_side(out: &mut String, side: &[(usize, u32)], mech: &Mechanism) {
    for (k, &(i, c)) in side.iter().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        if c != 1 {
            let _ = write!(out, "{c} ");
        }
        out.push_str(&mech.species()[i].name);
    }
}

fn write_arrhenius(out: &mut String, a: &Arrhenius) {
    let _ = write!(out, "{} {} {}", format_f64(a.a), format_f64(a.beta), format_f64(a.e));
}

fn write_coeffs(out: &mut String, c: &[f64; 7]) {
    for v in c {
        out.push(' ');
        out.push_str(&format_f64(*v));
    }
}

/// Text form that [`parse_mechanism`] reads back to an identical mechanism.
pub fn serialize_mechanism(mech: &Mechanism) -> String {
    let mut out = format!("format {MECHANISM_FORMAT_VERSION}\n\n[species]\n");
    for sp in mech.species() {
        let th = &sp.thermo;
        let _ = write!(
            out,
            "{} {} {} {} {} |",
            sp.name,
            format_f64(sp.molar_mass),
            format_f64(th.t_low),
            format_f64(th.t_mid),
            format_f64(th.t_high)
        );
        write_coeffs(&mut out, &th.low);
        if th.high != th.low {
            out.push_str(" |");
            write_coeffs(&mut out, &th.high);
        }
        out.push('\n');
    }
    out.push_str("\n[reactions]\n");
    for rxn in mech.reactions() {
        write_side(&mut out, &rxn.reactants, mech);
        out.push_str(if rxn.reversible { " <=> " } else { " => " });
        write_side(&mut out, &rxn.products, mech);
        out.push_str("  ");
        write_arrhenius(&mut out, &rxn.forward);
        if let Some(rev) = &rxn.explicit_reverse {
            out.push_str("  rev: ");
            write_arrhenius(&mut out, rev);
        }
        out.push('\n');
    }
    out
}
