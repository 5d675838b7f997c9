//! Text syntax for polynomials, differential forms and vector fields.
//!
//! Grammar (EBNF):
//! ```text
//! poly    := [ '-' ] term { ('+' | '-') term }
//! term    := coeff [ '*' monos ] | monos
//! coeff   := int [ '/' int ]
//! monos   := varpow { '*' varpow }
//! varpow  := var [ '^' int ]
//! var     := 'x' int
//!
//! form    := [ '-' ] fterm { ('+' | '-') fterm }
//! fterm   := '(' poly ')' [ '*' dwedge ]
//! dwedge  := dvar { '^' dvar }
//! dvar    := 'dx' int
//!
//! vfield  := [ '-' ] vterm { ('+' | '-') vterm }
//! vterm   := '(' poly ')' '*' 'd/dx' int
//! ```
//! Implicit multiplication is not accepted. Parsing normalizes to canonical
//! form, so `print . parse` is the identity on canonical text and
//! `parse . print` is the identity on values.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::exterior::{PForm, PVec};
use crate::poly::Poly;

/// Parse failure with 1-based position and the tokens that were expected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message} (expected {})", expected.join(" | "))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>, expected: &[&str]) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    DVar(usize),
    VecD(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "integer {v}"),
            Tok::Var(i) => write!(f, "x{i}"),
            Tok::DVar(i) => write!(f, "dx{i}"),
            Tok::VecD(i) => write!(f, "d/dx{i}"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            chars: s.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn lex(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '-' => {
                    self.bump();
                    Tok::Minus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                '^' => {
                    self.bump();
                    Tok::Caret
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '0'..='9' => Tok::Int(self.lex_number()),
                'x' => {
                    self.bump();
                    Tok::Var(self.lex_index(line, col)?)
                }
                'd' => {
                    self.bump();
                    match self.chars.peek() {
                        Some('x') => {
                            self.bump();
                            Tok::DVar(self.lex_index(line, col)?)
                        }
                        Some('/') => {
                            self.bump();
                            for want in ['d', 'x'] {
                                if self.chars.peek() != Some(&want) {
                                    return Err(ParseError::new(
                                        self.line,
                                        self.col,
                                        "malformed vector-field differential",
                                        &["d/dx<index>"],
                                    ));
                                }
                                self.bump();
                            }
                            Tok::VecD(self.lex_index(line, col)?)
                        }
                        _ => {
                            return Err(ParseError::new(
                                line,
                                col,
                                "stray 'd'",
                                &["dx<index>", "d/dx<index>"],
                            ))
                        }
                    }
                }
                other => {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("unexpected character '{other}'"),
                        &["term"],
                    ))
                }
            };
            out.push((tok, line, col));
        }
    }

    fn lex_number(&mut self) -> BigInt {
        let mut s = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        s.parse().expect("digits form an integer")
    }

    fn lex_index(&mut self, line: u32, col: u32) -> Result<usize, ParseError> {
        if !matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(ParseError::new(
                self.line,
                self.col,
                "missing variable index",
                &["digit"],
            ));
        }
        let _ = (line, col);
        let mut s = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        s.parse()
            .map_err(|_| ParseError::new(line, col, "variable index overflow", &["index"]))
    }
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
    /// Explicit variable count; `None` infers from the largest index seen.
    nvars: Option<usize>,
    max_index: usize,
}

impl Parser {
    fn new(input: &str, nvars: Option<usize>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: Lexer::new(input).lex()?,
            pos: 0,
            nvars,
            max_index: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message, expected)
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.peek()), &["end of input"]))
        }
    }

    fn note_var_at(&mut self, i: usize, line: u32, col: u32) -> Result<(), ParseError> {
        if let Some(n) = self.nvars {
            if i >= n {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unknown variable x{i} (nvars = {n})"),
                    &["variable below nvars"],
                ));
            }
        }
        self.max_index = self.max_index.max(i);
        Ok(())
    }

    fn effective_nvars(&self) -> usize {
        self.nvars.unwrap_or(self.max_index + 1).max(1)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            other => Err(self.err(format!("expected a number, found {other}"), &["integer"])),
        }
    }

    /// coeff := int [ '/' int ]
    fn coefficient(&mut self) -> Result<BigRational, ParseError> {
        let num = self.integer()?;
        if *self.peek() == Tok::Slash {
            self.bump();
            let den = self.integer()?;
            if den == BigInt::from(0) {
                return Err(self.err("zero denominator", &["nonzero integer"]));
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    /// varpow := var [ '^' nat ]
    fn varpow(&mut self) -> Result<(usize, u32), ParseError> {
        let (line, col) = self.here();
        let i = match self.peek().clone() {
            Tok::Var(i) => {
                self.bump();
                i
            }
            other => {
                return Err(self.err(format!("expected a variable, found {other}"), &["x<index>"]))
            }
        };
        self.note_var_at(i, line, col)?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.integer().map_err(|e| {
                ParseError::new(
                    e.line,
                    e.col,
                    "missing exponent after '^'",
                    &["nonnegative integer"],
                )
            })?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.err("exponent out of range", &["small nonnegative integer"]))?;
            Ok((i, e))
        } else {
            Ok((i, 1))
        }
    }

    /// One signed term: returns (coefficient, exponent pairs).
    fn term(&mut self) -> Result<(BigRational, Vec<(usize, u32)>), ParseError> {
        let mut pairs = Vec::new();
        let coef = match self.peek() {
            Tok::Int(_) => {
                let c = self.coefficient()?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    pairs.push(self.varpow()?);
                }
                c
            }
            Tok::Var(_) => {
                pairs.push(self.varpow()?);
                BigRational::from_integer(1.into())
            }
            other => {
                return Err(self.err(
                    format!("expected a term, found {other}"),
                    &["integer", "x<index>"],
                ))
            }
        };
        while *self.peek() == Tok::Star {
            self.bump();
            pairs.push(self.varpow()?);
        }
        Ok((coef, pairs))
    }

    /// poly := [ '-' ] term { ('+'|'-') term }
    fn poly_terms(&mut self) -> Result<Vec<(BigRational, Vec<(usize, u32)>)>, ParseError> {
        let mut out = Vec::new();
        let mut sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1i32
            }
            _ => 1,
        };
        loop {
            let (c, pairs) = self.term()?;
            out.push((if sign < 0 { -c } else { c }, pairs));
            sign = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    1
                }
                Tok::Minus => {
                    self.bump();
                    -1
                }
                _ => return Ok(out),
            };
        }
    }

    fn build_poly(&self, terms: &[(BigRational, Vec<(usize, u32)>)]) -> Poly {
        let n = self.effective_nvars();
        let mut p = Poly::zero(n);
        for (c, pairs) in terms {
            let mut exps = vec![0u32; n];
            for &(i, e) in pairs {
                exps[i] += e;
            }
            p = &p + &Poly::from_terms(n, &[(&exps, c.clone())]);
        }
        p
    }

    /// dwedge := dvar { '^' dvar }
    fn dwedge(&mut self) -> Result<Vec<usize>, ParseError> {
        let mut idx = Vec::new();
        loop {
            let (line, col) = self.here();
            match self.peek().clone() {
                Tok::DVar(i) => {
                    self.bump();
                    self.note_var_at(i, line, col)?;
                    idx.push(i);
                }
                other => {
                    return Err(self.err(
                        format!("expected a differential, found {other}"),
                        &["dx<index>"],
                    ))
                }
            }
            if *self.peek() == Tok::Caret {
                self.bump();
            } else {
                return Ok(idx);
            }
        }
    }

    /// fterm := '(' poly ')' [ '*' dwedge ]
    fn fterm(&mut self) -> Result<(Vec<(BigRational, Vec<(usize, u32)>)>, Vec<usize>), ParseError> {
        if *self.peek() != Tok::LParen {
            return Err(self.err(
                format!("expected '(' opening a coefficient, found {}", self.peek()),
                &["'('"],
            ));
        }
        self.bump();
        let terms = self.poly_terms()?;
        if *self.peek() != Tok::RParen {
            return Err(self.err(format!("expected ')', found {}", self.peek()), &["')'"]));
        }
        self.bump();
        if *self.peek() == Tok::Star {
            self.bump();
            let idx = self.dwedge()?;
            Ok((terms, idx))
        } else {
            Ok((terms, Vec::new()))
        }
    }
}

/// Parse a polynomial; `nvars = None` infers the variable count from the
/// largest index present.
pub fn parse_poly(input: &str, nvars: Option<usize>) -> Result<Poly, ParseError> {
    let mut p = Parser::new(input, nvars)?;
    let terms = p.poly_terms()?;
    p.expect_end()?;
    Ok(p.build_poly(&terms))
}

/// Parse a differential form. All terms must carry wedges of one common
/// length; the plain `(poly)` shape is a 0-form.
pub fn parse_form(input: &str, nvars: Option<usize>) -> Result<PForm, ParseError> {
    let mut p = Parser::new(input, nvars)?;
    // Bare zero: accepted as the zero 0-form.
    if let (Tok::Int(v), true) = (p.peek().clone(), p.toks.len() == 2) {
        if v == BigInt::from(0) {
            return Ok(PForm::zero(p.effective_nvars(), 0));
        }
    }
    let mut pieces: Vec<(i32, Vec<(BigRational, Vec<(usize, u32)>)>, Vec<usize>)> = Vec::new();
    let mut sign = match p.peek() {
        Tok::Minus => {
            p.bump();
            -1i32
        }
        _ => 1,
    };
    loop {
        let (line, col) = p.here();
        let (terms, idx) = p.fterm()?;
        if let Some((_, _, first_idx)) = pieces.first() {
            if first_idx.len() != idx.len() {
                return Err(ParseError::new(
                    line,
                    col,
                    format!(
                        "mixed form degrees: component has {} differentials, earlier ones {}",
                        idx.len(),
                        first_idx.len()
                    ),
                    &["matching wedge length"],
                ));
            }
        }
        pieces.push((sign, terms, idx));
        sign = match p.peek() {
            Tok::Plus => {
                p.bump();
                1
            }
            Tok::Minus => {
                p.bump();
                -1
            }
            _ => break,
        };
    }
    p.expect_end()?;
    let n = p.effective_nvars();
    let formdeg = pieces.first().map(|(_, _, idx)| idx.len()).unwrap_or(0);
    let mut out = PForm::zero(n, formdeg);
    for (sign, terms, idx) in pieces {
        let mut poly = p.build_poly(&terms);
        if sign < 0 {
            poly = -&poly;
        }
        out = out.add(&PForm::from_comps(n, formdeg, vec![(idx, poly)]));
    }
    Ok(out)
}

/// Parse a polynomial vector field `(poly)*d/dx0 + ...`.
pub fn parse_pvec(input: &str, nvars: Option<usize>) -> Result<PVec, ParseError> {
    let mut p = Parser::new(input, nvars)?;
    if let (Tok::Int(v), true) = (p.peek().clone(), p.toks.len() == 2) {
        if v == BigInt::from(0) {
            return Ok(PVec::zero(p.effective_nvars()));
        }
    }
    let mut pieces: Vec<(i32, Vec<(BigRational, Vec<(usize, u32)>)>, usize)> = Vec::new();
    let mut sign = match p.peek() {
        Tok::Minus => {
            p.bump();
            -1i32
        }
        _ => 1,
    };
    loop {
        if *p.peek() != Tok::LParen {
            return Err(p.err(format!("expected '(', found {}", p.peek()), &["'('"]));
        }
        p.bump();
        let terms = p.poly_terms()?;
        if *p.peek() != Tok::RParen {
            return Err(p.err(format!("expected ')', found {}", p.peek()), &["')'"]));
        }
        p.bump();
        if *p.peek() != Tok::Star {
            return Err(p.err(format!("expected '*', found {}", p.peek()), &["'*'"]));
        }
        p.bump();
        let (vline, vcol) = p.here();
        let i = match p.peek().clone() {
            Tok::VecD(i) => {
                p.bump();
                p.note_var_at(i, vline, vcol)?;
                i
            }
            other => {
                return Err(p.err(
                    format!("expected d/dx<index>, found {other}"),
                    &["d/dx<index>"],
                ))
            }
        };
        pieces.push((sign, terms, i));
        sign = match p.peek() {
            Tok::Plus => {
                p.bump();
                1
            }
            Tok::Minus => {
                p.bump();
                -1
            }
            _ => break,
        };
    }
    p.expect_end()?;
    let n = p.effective_nvars();
    let mut comps = vec![Poly::zero(n); n];
    for (sign, terms, i) in pieces {
        let mut poly = p.build_poly(&terms);
        if sign < 0 {
            poly = -&poly;
        }
        comps[i] = &comps[i] + &poly;
    }
    Ok(PVec::new(comps))
}
