//! Text formats: reaction networks (`.crn`), matrix systems, points files and
//! generalized polynomials.
//!
//! A network file has an optional `species:` header, one reaction per line and an
//! optional `kinetics:` block with one row of exponents per species:
//!
//! ```text
//! species: X1, X2
//! X1 + X2 -> 2 X2 ; k1
//! X2 -> X1 ; k2
//! ```
//!
//! A matrix file gives `N:` (or `Gamma:`) and `B:` blocks, and optionally `W:`,
//! `species:` and `rates:`. Exponent entries may be identifiers, which become symbols.
//! `#` starts a comment everywhere.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::rational::parse_rational;
use crate::algebra::{Rational, RationalMatrix};
use crate::network::{
    is_reserved_symbol, Exponent, ExponentMatrix, Kinetics, ModelError, Network, PowerLawSystem,
    Reaction,
};
use crate::polynomialize::{GeneralizedSystem, GeneralizedTerm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub snippet: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )?;
        writeln!(f, "  {}", self.snippet)?;
        write!(f, "  {}^", " ".repeat(self.column.saturating_sub(1)))
    }
}

impl std::error::Error for ParseError {}

/// Either a parse error with a position or a model-construction error.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Arrow,
    Reversible,
    Semi,
    Comma,
    Colon,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Reversible => "`<=>`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

/// One source line and its tokens.
struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Line<'a> {
    fn lex(number: usize, text: &'a str) -> Result<Self, ParseError> {
        let code = text.split('#').next().unwrap_or("");
        let chars: Vec<char> = code.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        let err = |col: usize, message: String| ParseError {
            line: number,
            column: col,
            message,
            snippet: text.to_string(),
        };
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
                let len = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .count();
                (Tok::Ident(chars[i..i + len].iter().collect()), len)
            } else if c.is_ascii_digit()
                || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit))
            {
                let len = number_length(&chars[i..]);
                (Tok::Number(chars[i..i + len].iter().collect()), len)
            } else if chars[i..].starts_with(&['<', '=', '>']) {
                (Tok::Reversible, 3)
            } else if chars[i..].starts_with(&['-', '>']) {
                (Tok::Arrow, 2)
            } else {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => return Err(err(col, format!("unexpected character `{c}`"))),
                };
                (tok, 1)
            };
            tokens.push(Token { tok, col });
            i += len;
        }
        Ok(Line {
            number,
            text,
            tokens,
            pos: 0,
        })
    }

    fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Column of the current token, or of the last character when past the end.
    fn col(&self) -> usize {
        match self.tokens.get(self.pos) {
            Some(t) => t.col,
            None => self.end_col(),
        }
    }

    fn end_col(&self) -> usize {
        let code = self.text.split('#').next().unwrap_or("");
        code.trim_end().chars().count().max(1)
    }

    fn error_at(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column: col,
            message: message.into(),
            snippet: self.text.to_string(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.col(), message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {expected}, found {}", t.describe())),
            None => self.error(format!("expected {expected} before end of line")),
        }
    }

    /// `name :` at the start of the line.
    fn section_header(&self) -> Option<String> {
        match (self.tokens.first(), self.tokens.get(1)) {
            (
                Some(Token {
                    tok: Tok::Ident(name),
                    ..
                }),
                Some(Token {
                    tok: Tok::Colon, ..
                }),
            ) => Some(name.clone()),
            _ => None,
        }
    }

    fn has(&self, tok: &Tok) -> bool {
        self.tokens.iter().any(|t| &t.tok == tok)
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// A signed rational literal: `-2/3`, `0.5`, `1e-3`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let col = self.col();
        let negative = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let num = match self.next() {
            Some(Token {
                tok: Tok::Number(s),
                ..
            }) => s,
            _ => return Err(self.error_at(col, "expected a number")),
        };
        let mut text = num;
        if self.eat(&Tok::Slash) {
            match self.next() {
                Some(Token {
                    tok: Tok::Number(d),
                    ..
                }) => {
                    text = format!("{text}/{d}");
                }
                _ => return Err(self.error_at(col, "expected a denominator after `/`")),
            }
        }
        let q = parse_rational(&text).ok_or_else(|| {
            self.error_at(col, format!("`{text}` is not a valid rational number"))
        })?;
        Ok(if negative { -q } else { q })
    }

    /// Comma- or space-separated names.
    fn name_list(&mut self, what: &str) -> Result<Vec<(String, usize)>, ParseError> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.expect_ident(what)?);
            if !self.eat(&Tok::Comma)
                && !self.at_end()
                && !matches!(self.peek(), Some(Tok::Ident(_)))
            {
                return Err(self.unexpected("`,`"));
            }
        }
        Ok(out)
    }
}

fn number_length(chars: &[char]) -> usize {
    let digits = |from: usize| {
        chars[from..]
            .iter()
            .take_while(|c| c.is_ascii_digit())
            .count()
    };
    let mut i = digits(0);
    if chars.get(i) == Some(&'.') {
        i += 1 + digits(i + 1);
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let mut j = i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        let exp = digits(j);
        if exp > 0 {
            i = j + exp;
        }
    }
    i
}

fn lines(text: &str) -> Result<Vec<Line<'_>>, ParseError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Line::lex(i + 1, l))
        .filter(|l| !matches!(l, Ok(l) if l.is_empty()))
        .collect()
}

/// A row entry of a matrix block with its column.
#[derive(Debug, Clone)]
struct Cell {
    value: Exponent,
    col: usize,
}

#[derive(Debug, Clone)]
struct Block {
    header_line: usize,
    header_text: String,
    rows: Vec<(usize, String, Vec<Cell>)>,
}

impl Block {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.header_line,
            column: 1,
            message: message.into(),
            snippet: self.header_text.clone(),
        }
    }

    fn row_error(&self, row: usize, col: usize, message: impl Into<String>) -> ParseError {
        let (line, text, _) = &self.rows[row];
        ParseError {
            line: *line,
            column: col,
            message: message.into(),
            snippet: text.clone(),
        }
    }

    fn width(&self, name: &str) -> Result<usize, ParseError> {
        let width = self.rows.first().map_or(0, |r| r.2.len());
        for (i, (_, _, cells)) in self.rows.iter().enumerate() {
            if cells.len() != width {
                let col = cells.get(width).map_or(1, |c| c.col);
                return Err(self.row_error(
                    i,
                    col,
                    format!("{name} row has {} entries, expected {width}", cells.len()),
                ));
            }
        }
        Ok(width)
    }

    fn exponents(
        &self,
        name: &str,
        rows: usize,
        cols: usize,
    ) -> Result<ExponentMatrix, ParseError> {
        if self.rows.len() != rows {
            return Err(self.error(format!(
                "{name} has {} rows, expected {rows}",
                self.rows.len()
            )));
        }
        for (i, (_, _, cells)) in self.rows.iter().enumerate() {
            if cells.len() != cols {
                let col = cells.get(cols).or(cells.last()).map_or(1, |c| c.col);
                return Err(self.row_error(
                    i,
                    col,
                    format!("{name} row has {} entries, expected {cols}", cells.len()),
                ));
            }
            for c in cells {
                if let Exponent::Symbol(s) = &c.value {
                    if is_reserved_symbol(s) {
                        return Err(self.row_error(
                            i,
                            c.col,
                            format!("symbol `{s}` is reserved for analysis parameters"),
                        ));
                    }
                }
            }
        }
        let entries = self
            .rows
            .iter()
            .flat_map(|(_, _, cells)| cells.iter().map(|c| c.value.clone()))
            .collect();
        ExponentMatrix::new(rows, cols, entries).map_err(|e| self.error(e.to_string()))
    }

    fn numeric(
        &self,
        name: &str,
        rows: Option<usize>,
        cols: usize,
    ) -> Result<RationalMatrix, ParseError> {
        let rows = rows.unwrap_or(self.rows.len());
        let m = self.exponents(name, rows, cols)?;
        for (i, (_, _, cells)) in self.rows.iter().enumerate() {
            for c in cells {
                if let Exponent::Symbol(s) = &c.value {
                    return Err(self.row_error(
                        i,
                        c.col,
                        format!("{name} entries must be numbers, found `{s}`"),
                    ));
                }
            }
        }
        Ok(m.numeric().expect("checked numeric"))
    }
}

fn parse_cells(line: &mut Line<'_>) -> Result<Vec<Cell>, ParseError> {
    let mut cells = Vec::new();
    while !line.at_end() {
        let col = line.col();
        let value = match line.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                line.next();
                Exponent::Symbol(s)
            }
            Some(Tok::Number(_) | Tok::Minus | Tok::Plus) => Exponent::Value(line.rational()?),
            _ => return Err(line.unexpected("a number or symbol")),
        };
        cells.push(Cell { value, col });
        line.eat(&Tok::Comma);
    }
    Ok(cells)
}

/// A complex such as `2 X1 + X2` or `0`. Species are registered on first use unless
/// a header fixed the list.
fn parse_complex(
    line: &mut Line<'_>,
    species: &mut SpeciesTable,
) -> Result<HashMap<usize, u32>, ParseError> {
    let mut coeffs: HashMap<usize, u32> = HashMap::new();
    if let (Some(Tok::Number(n)), next) = (line.peek(), line.peek_at(1)) {
        if n == "0" && !matches!(next, Some(Tok::Ident(_) | Tok::Star)) {
            line.next();
            return Ok(coeffs);
        }
    }
    loop {
        let col = line.col();
        let coeff = match line.peek() {
            Some(Tok::Number(s)) => {
                let s = s.clone();
                line.next();
                if line.peek() == Some(&Tok::Slash) || s.contains(['.', 'e', 'E']) {
                    return Err(line.error_at(
                        col,
                        "stoichiometric coefficients must be non-negative integers",
                    ));
                }
                line.eat(&Tok::Star);
                s.parse::<u32>()
                    .map_err(|_| line.error_at(col, format!("coefficient `{s}` is too large")))?
            }
            Some(Tok::Minus) => {
                return Err(line.error("stoichiometric coefficients must be non-negative integers"))
            }
            _ => 1,
        };
        let (name, name_col) = line.expect_ident("a species name")?;
        let idx = species.lookup(&name, line, name_col)?;
        *coeffs.entry(idx).or_insert(0) += coeff;
        let plus_col = line.col();
        if !line.eat(&Tok::Plus) {
            break;
        }
        if !matches!(line.peek(), Some(Tok::Ident(_) | Tok::Number(_))) {
            return Err(line.error_at(plus_col, "dangling `+`: expected a species after it"));
        }
    }
    Ok(coeffs)
}

struct SpeciesTable {
    names: Vec<String>,
    fixed: bool,
}

impl SpeciesTable {
    fn lookup(&mut self, name: &str, line: &Line<'_>, col: usize) -> Result<usize, ParseError> {
        if let Some(i) = self.names.iter().position(|s| s == name) {
            return Ok(i);
        }
        if self.fixed {
            return Err(line.error_at(
                col,
                format!("unknown species `{name}` (not in the species header)"),
            ));
        }
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }
}

struct RawReaction {
    reactant: HashMap<usize, u32>,
    product: HashMap<usize, u32>,
    rate: Option<(String, usize)>,
    line: usize,
    text: String,
    arrow_col: usize,
}

/// Parses one reaction line into one or two reactions.
fn parse_reaction_line(
    line: &mut Line<'_>,
    species: &mut SpeciesTable,
) -> Result<Vec<RawReaction>, ParseError> {
    if matches!(line.peek(), Some(Tok::Arrow | Tok::Reversible)) {
        return Err(
            line.error("expected a complex before the arrow (use `0` for the empty complex)")
        );
    }
    let left = parse_complex(line, species)?;
    let arrow_col = line.col();
    let reversible = match line.peek() {
        Some(Tok::Arrow) => false,
        Some(Tok::Reversible) => true,
        _ => return Err(line.unexpected("`->` or `<=>`")),
    };
    line.next();
    if line.at_end() || line.peek() == Some(&Tok::Semi) {
        return Err(
            line.error("expected a complex after the arrow (use `0` for the empty complex)")
        );
    }
    let right = parse_complex(line, species)?;
    let mut names = Vec::new();
    if line.eat(&Tok::Semi) {
        names = line.name_list("a rate constant name")?;
        let max = if reversible { 2 } else { 1 };
        if names.len() > max || names.is_empty() {
            let col = names.get(max).map_or(line.col(), |n| n.1);
            return Err(line.error_at(
                col,
                format!(
                    "expected {} rate name{}",
                    if reversible { "two" } else { "one" },
                    if reversible { "s" } else { "" }
                ),
            ));
        }
        if reversible && names.len() == 1 {
            return Err(line.error_at(names[0].1, "a reversible reaction needs two rate names"));
        }
    } else if !line.at_end() {
        return Err(line.unexpected("`;` or end of line"));
    }
    let mk = |reactant: &HashMap<usize, u32>, product: &HashMap<usize, u32>, rate| RawReaction {
        reactant: reactant.clone(),
        product: product.clone(),
        rate,
        line: line.number,
        text: line.text.to_string(),
        arrow_col,
    };
    let mut names = names.into_iter();
    let mut out = vec![mk(&left, &right, names.next())];
    if reversible {
        out.push(mk(&right, &left, names.next()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientSource {
    /// Reduced coefficient matrix `N`.
    Reduced(RationalMatrix),
    /// Stoichiometric matrix `Γ`.
    Stoichiometric(RationalMatrix),
}

/// A parsed model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelInput {
    Network {
        network: Network,
        kinetics: Kinetics,
        conservation: Option<RationalMatrix>,
    },
    Matrices {
        species: Vec<String>,
        rates: Vec<String>,
        coefficients: CoefficientSource,
        exponents: ExponentMatrix,
        conservation: Option<RationalMatrix>,
    },
}

impl ModelInput {
    pub fn build(&self) -> Result<PowerLawSystem, ModelError> {
        match self {
            ModelInput::Network {
                network,
                kinetics,
                conservation,
            } => {
                let sys = PowerLawSystem::from_network(network, kinetics)?;
                match conservation {
                    Some(w) => sys.with_conservation(w.clone()),
                    None => Ok(sys),
                }
            }
            ModelInput::Matrices {
                species,
                rates,
                coefficients,
                exponents,
                conservation,
            } => match coefficients {
                CoefficientSource::Reduced(n) => PowerLawSystem::from_coefficients(
                    species.clone(),
                    rates.clone(),
                    n.clone(),
                    exponents.clone(),
                    conservation.clone(),
                ),
                CoefficientSource::Stoichiometric(g) => {
                    let sys = PowerLawSystem::from_gamma(
                        species.clone(),
                        rates.clone(),
                        g.clone(),
                        exponents.clone(),
                    )?;
                    match conservation {
                        Some(w) => sys.with_conservation(w.clone()),
                        None => Ok(sys),
                    }
                }
            },
        }
    }
}

/// A `species:` or `rates:` header: line, raw text and names with their columns.
type Header = (usize, String, Vec<(String, usize)>);

const SECTIONS: [&str; 7] = ["species", "rates", "kinetics", "B", "N", "Gamma", "W"];

/// Parses a network or matrix file.
pub fn parse_input(text: &str) -> Result<ModelInput, ParseError> {
    let mut species_header: Option<Header> = None;
    let mut rates_header: Option<Header> = None;
    let mut blocks: HashMap<String, Block> = HashMap::new();
    let mut current: Option<String> = None;
    let mut reaction_lines: Vec<Line<'_>> = Vec::new();

    for mut line in lines(text)? {
        if let Some(name) = line.section_header() {
            let name = if name == "kinetics" {
                "B".to_string()
            } else {
                name
            };
            if !SECTIONS.contains(&name.as_str()) {
                return Err(line.error_at(1, format!("unknown section `{name}:`")));
            }
            line.pos = 2;
            if blocks.contains_key(&name)
                || (name == "species" && species_header.is_some())
                || (name == "rates" && rates_header.is_some())
            {
                return Err(line.error_at(1, format!("section `{name}:` appears twice")));
            }
            match name.as_str() {
                "species" => {
                    if !reaction_lines.is_empty() {
                        return Err(
                            line.error_at(1, "the species header must precede the reactions")
                        );
                    }
                    let names = line.name_list("a species name")?;
                    species_header = Some((line.number, line.text.to_string(), names));
                    current = None;
                }
                "rates" => {
                    let names = line.name_list("a rate constant name")?;
                    rates_header = Some((line.number, line.text.to_string(), names));
                    current = None;
                }
                _ => {
                    let mut block = Block {
                        header_line: line.number,
                        header_text: line.text.to_string(),
                        rows: Vec::new(),
                    };
                    let cells = parse_cells(&mut line)?;
                    if !cells.is_empty() {
                        block.rows.push((line.number, line.text.to_string(), cells));
                    }
                    blocks.insert(name.clone(), block);
                    current = Some(name);
                }
            }
            continue;
        }
        if line.has(&Tok::Arrow) || line.has(&Tok::Reversible) {
            current = None;
            reaction_lines.push(line);
            continue;
        }
        match &current {
            Some(name) => {
                let cells = parse_cells(&mut line)?;
                let (number, text) = (line.number, line.text.to_string());
                blocks
                    .get_mut(name)
                    .expect("open block")
                    .rows
                    .push((number, text, cells));
            }
            None => {
                if line.has(&Tok::Plus) || matches!(line.peek(), Some(Tok::Ident(_))) {
                    return Err(
                        line.error_at(line.end_col(), "expected `->` or `<=>` in a reaction")
                    );
                }
                return Err(line.error_at(1, "expected a reaction or a section header"));
            }
        }
    }

    let matrix_kind = ["N", "Gamma"].iter().find(|k| blocks.contains_key(**k));
    if let Some(kind) = matrix_kind {
        if let Some(l) = reaction_lines.first() {
            return Err(l.error_at(
                1,
                format!("a file with a `{kind}:` block cannot also list reactions"),
            ));
        }
        if blocks.contains_key("N") && blocks.contains_key("Gamma") {
            return Err(blocks["Gamma"].error("give either `N:` or `Gamma:`, not both"));
        }
        return matrix_input(kind, &blocks, species_header, rates_header);
    }
    if reaction_lines.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "no reactions and no `N:`/`Gamma:` block found".into(),
            snippet: text.lines().next().unwrap_or("").to_string(),
        });
    }
    network_input(reaction_lines, &blocks, species_header, rates_header)
}

fn network_input(
    reaction_lines: Vec<Line<'_>>,
    blocks: &HashMap<String, Block>,
    species_header: Option<Header>,
    rates_header: Option<Header>,
) -> Result<ModelInput, ParseError> {
    if let Some((line, text, _)) = rates_header {
        return Err(ParseError {
            line,
            column: 1,
            message:
                "`rates:` is only used with matrix input; name rates after `;` on each reaction"
                    .into(),
            snippet: text,
        });
    }
    let mut table = SpeciesTable {
        names: Vec::new(),
        fixed: false,
    };
    if let Some((line, text, names)) = &species_header {
        for (name, col) in names {
            if table.names.contains(name) {
                return Err(ParseError {
                    line: *line,
                    column: *col,
                    message: format!("duplicate species `{name}`"),
                    snippet: text.clone(),
                });
            }
            table.names.push(name.clone());
        }
        table.fixed = true;
    }
    let mut raw = Vec::new();
    for mut line in reaction_lines {
        raw.extend(parse_reaction_line(&mut line, &mut table)?);
    }
    let n = table.names.len();
    let dense = |m: &HashMap<usize, u32>| {
        let mut v = vec![0u32; n];
        for (&i, &c) in m {
            v[i] += c;
        }
        v
    };
    let mut reactions = Vec::with_capacity(raw.len());
    let mut rate_seen: HashMap<String, ()> = HashMap::new();
    for (j, r) in raw.iter().enumerate() {
        let reactant = dense(&r.reactant);
        let product = dense(&r.product);
        let err = |col: usize, message: String| ParseError {
            line: r.line,
            column: col,
            message,
            snippet: r.text.clone(),
        };
        if reactant == product {
            return Err(err(
                r.arrow_col,
                "null reaction: reactant and product complexes are equal".into(),
            ));
        }
        let (rate, col) = r
            .rate
            .clone()
            .unwrap_or_else(|| (format!("k{}", j + 1), r.arrow_col));
        if rate_seen.insert(rate.clone(), ()).is_some() {
            return Err(err(col, format!("duplicate rate constant `{rate}`")));
        }
        reactions.push(Reaction {
            reactant,
            product,
            rate,
        });
    }
    let species = table.names;
    let r = reactions.len();
    let network = Network::new(species, reactions).map_err(|e| ParseError {
        line: raw[0].line,
        column: 1,
        message: e.to_string(),
        snippet: raw[0].text.clone(),
    })?;
    let kinetics = match blocks.get("B") {
        Some(b) => Kinetics::Explicit(b.exponents("kinetics", n, r)?),
        None => Kinetics::MassAction,
    };
    let conservation = blocks
        .get("W")
        .map(|w| w.numeric("W", None, n))
        .transpose()?;
    Ok(ModelInput::Network {
        network,
        kinetics,
        conservation,
    })
}

fn matrix_input(
    kind: &str,
    blocks: &HashMap<String, Block>,
    species_header: Option<Header>,
    rates_header: Option<Header>,
) -> Result<ModelInput, ParseError> {
    let coeff_block = &blocks[kind];
    if coeff_block.rows.is_empty() {
        return Err(coeff_block.error(format!("`{kind}:` block has no rows")));
    }
    let r = coeff_block.width(kind)?;
    let b_block = blocks
        .get("B")
        .ok_or_else(|| coeff_block.error("a matrix file needs a `B:` block"))?;
    let n = match kind {
        "Gamma" => coeff_block.rows.len(),
        _ => b_block.rows.len(),
    };
    let species = names_or_default(species_header, "X", n, "species")?;
    let rates = names_or_default(rates_header, "k", r, "rate")?;
    let coeffs = coeff_block.numeric(kind, None, r)?;
    let exponents = b_block.exponents("B", n, r)?;
    let conservation = blocks
        .get("W")
        .map(|w| w.numeric("W", None, n))
        .transpose()?;
    let coefficients = match kind {
        "Gamma" => CoefficientSource::Stoichiometric(coeffs),
        _ => CoefficientSource::Reduced(coeffs),
    };
    Ok(ModelInput::Matrices {
        species,
        rates,
        coefficients,
        exponents,
        conservation,
    })
}

fn names_or_default(
    header: Option<Header>,
    prefix: &str,
    count: usize,
    what: &str,
) -> Result<Vec<String>, ParseError> {
    match header {
        None => Ok((1..=count).map(|i| format!("{prefix}{i}")).collect()),
        Some((line, text, names)) => {
            if names.len() != count {
                return Err(ParseError {
                    line,
                    column: 1,
                    message: format!(
                        "{} {what} names given, the matrices need {count}",
                        names.len()
                    ),
                    snippet: text,
                });
            }
            for (i, (name, col)) in names.iter().enumerate() {
                if names[..i].iter().any(|(m, _)| m == name) {
                    return Err(ParseError {
                        line,
                        column: *col,
                        message: format!("duplicate {what} `{name}`"),
                        snippet: text,
                    });
                }
            }
            Ok(names.into_iter().map(|(n, _)| n).collect())
        }
    }
}

/// Parses a reaction-network file and returns only the network.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    match parse_input(text)? {
        ModelInput::Network { network, .. } => Ok(network),
        ModelInput::Matrices { .. } => Err(ParseError {
            line: 1,
            column: 1,
            message: "expected reactions, found a matrix file".into(),
            snippet: text.lines().next().unwrap_or("").to_string(),
        }),
    }
}

/// Parses an exponent block (with or without a `kinetics:` header) for `net`.
pub fn parse_kinetics(text: &str, net: &Network) -> Result<RationalMatrix, ParseError> {
    let mut block = Block {
        header_line: 1,
        header_text: text.lines().next().unwrap_or("").to_string(),
        rows: Vec::new(),
    };
    for mut line in lines(text)? {
        if let Some(name) = line.section_header() {
            if name != "kinetics" || !block.rows.is_empty() {
                return Err(line.error_at(1, format!("unexpected section `{name}:`")));
            }
            block.header_line = line.number;
            block.header_text = line.text.to_string();
            line.pos = 2;
        }
        let cells = parse_cells(&mut line)?;
        if !cells.is_empty() {
            block.rows.push((line.number, line.text.to_string(), cells));
        }
    }
    block.numeric("kinetics", Some(net.species().len()), net.reactions().len())
}

/// Parses a model file and builds the system.
pub fn parse_system(text: &str) -> Result<PowerLawSystem, InputError> {
    Ok(parse_input(text)?.build()?)
}

/// One line of a points file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSpec {
    pub line: usize,
    pub k: Vec<Rational>,
    pub x: Vec<Rational>,
}

/// Parses lines `k: <r numbers> x: <n numbers>`.
pub fn parse_points(text: &str, r: usize, n: usize) -> Result<Vec<PointSpec>, ParseError> {
    let mut out = Vec::new();
    for mut line in lines(text)? {
        let mut k = None;
        let mut x = None;
        while !line.at_end() {
            let (name, col) = line.expect_ident("`k:` or `x:`")?;
            if !line.eat(&Tok::Colon) {
                return Err(line.unexpected("`:`"));
            }
            let mut values = Vec::new();
            while matches!(line.peek(), Some(Tok::Number(_) | Tok::Minus | Tok::Plus)) {
                values.push(line.rational()?);
                line.eat(&Tok::Comma);
            }
            let (slot, expected) = match name.as_str() {
                "k" => (&mut k, r),
                "x" => (&mut x, n),
                _ => {
                    return Err(
                        line.error_at(col, format!("expected `k:` or `x:`, found `{name}:`"))
                    )
                }
            };
            if slot.is_some() {
                return Err(line.error_at(col, format!("`{name}:` given twice")));
            }
            if values.len() != expected {
                return Err(line.error_at(
                    col,
                    format!("`{name}:` needs {expected} values, found {}", values.len()),
                ));
            }
            *slot = Some(values);
        }
        match (k, x) {
            (Some(k), Some(x)) => out.push(PointSpec {
                line: line.number,
                k,
                x,
            }),
            _ => return Err(line.error_at(1, "each point needs both `k:` and `x:`")),
        }
    }
    Ok(out)
}

/// Parses a generalized polynomial system:
///
/// ```text
/// variables: x1, x2
/// g: x1*x2^(2/3) - 2*x1^(2/3)*x2^(2/3) + x1^(-1/3)*x2^(2/3)
/// ```
pub fn parse_generalized(text: &str) -> Result<GeneralizedSystem, ParseError> {
    let mut vars: Option<Vec<String>> = None;
    let mut equations = Vec::new();
    for mut line in lines(text)? {
        match line.section_header().as_deref() {
            Some("variables") => {
                if vars.is_some() {
                    return Err(line.error_at(1, "`variables:` appears twice"));
                }
                line.pos = 2;
                let names = line.name_list("a variable name")?;
                for (i, (name, col)) in names.iter().enumerate() {
                    if names[..i].iter().any(|(m, _)| m == name) {
                        return Err(line.error_at(*col, format!("duplicate variable `{name}`")));
                    }
                }
                vars = Some(names.into_iter().map(|(n, _)| n).collect());
            }
            Some("g") => {
                let Some(vs) = &vars else {
                    return Err(line.error_at(1, "`variables:` must come before the equations"));
                };
                line.pos = 2;
                equations.push(parse_sum(&mut line, vs)?);
            }
            _ => return Err(line.error_at(1, "expected `variables:` or `g:`")),
        }
    }
    let vars = vars.ok_or_else(|| ParseError {
        line: 1,
        column: 1,
        message: "missing `variables:` line".into(),
        snippet: text.lines().next().unwrap_or("").to_string(),
    })?;
    if equations.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "no `g:` equations".into(),
            snippet: text.lines().next().unwrap_or("").to_string(),
        });
    }
    GeneralizedSystem::new(vars, equations).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
        snippet: String::new(),
    })
}

fn parse_sum(line: &mut Line<'_>, vars: &[String]) -> Result<Vec<GeneralizedTerm>, ParseError> {
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let negative = if line.eat(&Tok::Minus) {
            true
        } else {
            if !line.eat(&Tok::Plus) && !first {
                return Err(line.unexpected("`+`, `-` or end of line"));
            }
            false
        };
        first = false;
        let mut term = parse_term(line, vars)?;
        if negative {
            term.coeff = -term.coeff;
        }
        terms.push(term);
        if line.at_end() {
            return Ok(terms);
        }
    }
}

fn parse_term(line: &mut Line<'_>, vars: &[String]) -> Result<GeneralizedTerm, ParseError> {
    let mut coeff = Rational::from_integer(1.into());
    let mut exponents = vec![Rational::from_integer(0.into()); vars.len()];
    let mut any = false;
    if matches!(line.peek(), Some(Tok::Number(_))) {
        coeff = line.rational()?;
        any = true;
        if !line.eat(&Tok::Star) && !matches!(line.peek(), Some(Tok::Ident(_))) {
            return Ok(GeneralizedTerm { coeff, exponents });
        }
    }
    loop {
        let (name, col) = match line.peek() {
            Some(Tok::Ident(_)) => line.expect_ident("a variable")?,
            _ if any => return Err(line.unexpected("a variable")),
            _ => return Err(line.unexpected("a term")),
        };
        let j = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| line.error_at(col, format!("unknown variable `{name}`")))?;
        let e = if line.eat(&Tok::Caret) {
            if line.eat(&Tok::LParen) {
                let q = line.rational()?;
                if !line.eat(&Tok::RParen) {
                    return Err(line.unexpected("`)`"));
                }
                q
            } else {
                line.rational()?
            }
        } else {
            Rational::from_integer(1.into())
        };
        exponents[j] += e;
        any = true;
        if !line.eat(&Tok::Star) && !matches!(line.peek(), Some(Tok::Ident(_))) {
            return Ok(GeneralizedTerm { coeff, exponents });
        }
    }
}
