//! Recursive-descent parser for feature descriptions.

use std::fmt;

use crate::formula::{Atom, Formula, Path};
use crate::paths::PathConstraint;
use crate::symbol::{Feature, Sort, Var, RESERVED_PREFIX};

/// Byte offsets `[start, end)` into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    /// One-based line and column of the span start.
    pub fn line_col(&self, text: &str) -> (usize, usize) {
        let before = &text[..self.start.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

const RESERVED_WORDS: &[&str] = &["true", "false", "exists", "forall", "undef", "eps"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    At,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Eq => "`=`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::DoubleArrow => "`<->`",
            Tok::At => "`@`",
            Tok::Semi => "`;`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| (t, SourceSpan::new(start, start + 1));
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push(single(Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push(single(Tok::RParen));
                i += 1;
            }
            b',' => {
                out.push(single(Tok::Comma));
                i += 1;
            }
            b'.' => {
                out.push(single(Tok::Dot));
                i += 1;
            }
            b'=' => {
                out.push(single(Tok::Eq));
                i += 1;
            }
            b'~' => {
                out.push(single(Tok::Tilde));
                i += 1;
            }
            b'&' => {
                out.push(single(Tok::Amp));
                i += 1;
            }
            b'|' => {
                out.push(single(Tok::Bar));
                i += 1;
            }
            b'@' => {
                out.push(single(Tok::At));
                i += 1;
            }
            b';' => {
                out.push(single(Tok::Semi));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, SourceSpan::new(i, i + 2)));
                i += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                out.push((Tok::DoubleArrow, SourceSpan::new(i, i + 3)));
                i += 3;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let span = SourceSpan::new(start, i);
                if word.starts_with(RESERVED_PREFIX) {
                    return Err(ParseError::new(
                        span,
                        format!("identifier `{word}` uses the reserved prefix `{RESERVED_PREFIX}`"),
                    ));
                }
                if word.as_bytes()[0].is_ascii_digit() {
                    return Err(ParseError::new(
                        span,
                        format!("identifier `{word}` starts with a digit"),
                    ));
                }
                out.push((Tok::Ident(word.to_owned()), span));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    SourceSpan::new(i, i + ch.len_utf8()),
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

fn is_upper(word: &str) -> bool {
    word.as_bytes()[0].is_ascii_uppercase()
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<SourceSpan, ParseError> {
        if self.peek() == &t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("{t}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.span(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn word(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) => {
                let span = self.bump().1;
                Ok((w, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn lower(&mut self, what: &str) -> Result<String, ParseError> {
        let (w, span) = self.word(what)?;
        if is_upper(&w) {
            return Err(ParseError::new(span, format!("expected {what}, found sort name `{w}`")));
        }
        if RESERVED_WORDS.contains(&w.as_str()) {
            return Err(ParseError::new(span, format!("`{w}` is a reserved word")));
        }
        Ok(w)
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        Ok(Var::new(&self.lower("a variable")?))
    }

    fn feature(&mut self) -> Result<Feature, ParseError> {
        Ok(Feature::new(&self.lower("a feature")?))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.eat(&Tok::DoubleArrow) {
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&Tok::Bar) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(w) if w == "exists" || w == "forall" => {
                self.bump();
                let mut vars = vec![self.var()?];
                while self.eat(&Tok::Comma) {
                    vars.push(self.var()?);
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if w == "exists" {
                    Formula::exists_all(vars, body)
                } else {
                    Formula::forall_all(vars, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(w) if w == "undef" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let x = self.var()?;
                self.expect(Tok::Comma)?;
                let f = self.feature()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Atom(Atom::Excl(x, f)))
            }
            Tok::Ident(w) if is_upper(&w) => self.sort_atom(),
            Tok::Ident(_) if self.peek_at(1) == &Tok::LParen => {
                let f = self.feature()?;
                self.bump();
                let x = self.var()?;
                self.expect(Tok::Comma)?;
                let y = self.var()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Atom(Atom::Feat(x, f, y)))
            }
            Tok::Ident(_) => self.equation(),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn sort_atom(&mut self) -> Result<Formula, ParseError> {
        let (name, _) = self.word("a sort")?;
        let sort = Sort::new(&name);
        if self.eat(&Tok::At) {
            let x = self.var()?;
            let p = if self.eat(&Tok::Dot) {
                self.path()?
            } else {
                Path::empty()
            };
            return Ok(Formula::Path(PathConstraint::SortAt(sort, x, p)));
        }
        self.expect(Tok::LParen)?;
        let x = self.var()?;
        self.expect(Tok::RParen)?;
        Ok(Formula::Atom(Atom::Sort(sort, x)))
    }

    fn rooted(&mut self) -> Result<(Var, Option<Path>), ParseError> {
        let x = self.var()?;
        let p = if self.eat(&Tok::Dot) { Some(self.path()?) } else { None };
        Ok((x, p))
    }

    fn equation(&mut self) -> Result<Formula, ParseError> {
        let (x, p) = self.rooted()?;
        self.expect(Tok::Eq)?;
        let (y, q) = self.rooted()?;
        Ok(match (p, q) {
            (None, None) => Formula::Atom(Atom::Eq(x, y)),
            (p, q) => Formula::Path(PathConstraint::Agree(
                x,
                p.unwrap_or_default(),
                y,
                q.unwrap_or_default(),
            )),
        })
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        if matches!(self.peek(), Tok::Ident(w) if w == "eps") {
            self.bump();
            return Ok(Path::empty());
        }
        let mut fs = vec![self.feature()?];
        while self.peek() == &Tok::Dot && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            fs.push(self.feature()?);
        }
        Ok(Path::from(fs))
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
    })
}

/// Parses one formula. Sugar (exclusions and path constraints) is kept.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = parser(text)?;
    let phi = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(phi)
}

/// Parses two formulae separated by `;`.
pub fn parse_formula_pair(text: &str) -> Result<(Formula, Formula), ParseError> {
    let mut p = parser(text)?;
    let a = p.formula()?;
    p.expect(Tok::Semi)?;
    let b = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok((a, b))
}
