//! Line and token splitting shared by the mechanism and config parsers.

use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    /// 1-based character column.
    pub column: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Line<'a> {
    /// 1-based line number.
    pub number: usize,
    /// Content with any `#` comment removed, untrimmed.
    pub content: &'a str,
}

impl<'a> Line<'a> {
    /// Whitespace-separated tokens; `|` always forms a token of its own.
    pub fn tokens(&self) -> Vec<Token<'a>> {
        let mut out = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        for (col, (byte, ch)) in self.content.char_indices().enumerate() {
            let col = col + 1;
            if ch.is_whitespace() || ch == '|' {
                if let Some((b0, c0)) = start.take() {
                    out.push(Token { text: &self.content[b0..byte], column: c0 });
                }
                if ch == '|' {
                    out.push(Token { text: &self.content[byte..byte + 1], column: col });
                }
            } else if start.is_none() {
                start = Some((byte, col));
            }
        }
        if let Some((b0, c0)) = start {
            out.push(Token { text: &self.content[b0..], column: c0 });
        }
        out
    }

    /// Section name if the line is `[name]`.
    pub fn section(&self) -> Option<Result<&'a str, ParseError>> {
        let t = self.content.trim();
        if !t.starts_with('[') {
            return None;
        }
        let column = self.content.find('[').map_or(1, |b| self.content[..b].chars().count() + 1);
        if !t.ends_with(']') || t.len() < 2 {
            return Some(Err(ParseError::new(
                ParseErrorKind::Syntax(format!("unterminated section header '{t}'")),
                self.number,
                column,
            )));
        }
        Some(Ok(t[1..t.len() - 1].trim()))
    }

    pub fn is_blank(&self) -> bool {
        self.content.trim().is_empty()
    }

    pub fn error(&self, kind: ParseErrorKind, column: usize) -> ParseError {
        ParseError::new(kind, self.number, column)
    }
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().map(|(i, raw)| {
        let content = match raw.find('#') {
            Some(b) => &raw[..b],
            None => raw,
        };
        Line { number: i + 1, content }
    })
}

/// Finite 64-bit float; scientific notation accepted, `inf`/`nan` rejected.
pub(crate) fn parse_f64(tok: &Token<'_>, line: usize) -> Result<f64, ParseError> {
    let bad = || ParseError::new(ParseErrorKind::InvalidNumber(tok.text.to_string()), line, tok.column);
    let first = tok.text.chars().next().ok_or_else(bad)?;
    if !(first.is_ascii_digit() || matches!(first, '+' | '-' | '.')) {
        return Err(bad());
    }
    let v: f64 = tok.text.parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Float formatted as the shortest string that parses back to the same bits.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x:?}")
    } else {
        format!("{x:e}")
    }
}
