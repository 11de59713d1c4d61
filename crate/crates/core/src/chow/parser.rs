//! Tokenizer and recursive-descent parsers for ring presentations and
//! intersection expressions.
//!
//! Presentation grammar, statements terminated by `;`, `#` starts a comment:
//!
//! ```text
//! gen <name>:<degree>;
//! rel <monomial>;
//! int <monomial> = <rational>;
//! cover <integer>;
//! ```
//!
//! Expressions use `+ - * ^`, parentheses, generator names and integer or
//! `num/den` literals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{ChowClass, ChowError, RingPresentation};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ChowError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                s.push(c);
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l, column: col });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
                column += 1;
            }
            let n = s.parse::<BigInt>().expect("digits form an integer");
            out.push(Token { tok: Tok::Int(n), line: l, column: col });
        } else if "+-*^()/:;=".contains(c) {
            chars.next();
            column += 1;
            out.push(Token { tok: Tok::Sym(c), line: l, column: col });
        } else {
            return Err(ChowError::parse(l, col, format!("unexpected character '{c}'")));
        }
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, ChowError> {
        Ok(Self { tokens: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ChowError {
        ChowError::parse(t.line, t.column, message.into())
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<Token, ChowError> {
        if self.at_sym(c) {
            Ok(self.next())
        } else {
            let t = self.peek().clone();
            Err(self.error_at(&t, format!("expected '{c}'")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Token), ChowError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            _ => Err(self.error_at(&t, "expected a name")),
        }
    }

    fn expect_int(&mut self) -> Result<(BigInt, Token), ChowError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok((n.clone(), t)),
            _ => Err(self.error_at(&t, "expected an integer")),
        }
    }

    /// Exponent after a `^` token, reported at the `^` when missing.
    fn exponent(&mut self, caret: &Token) -> Result<u32, ChowError> {
        match &self.peek().tok {
            Tok::Int(n) => {
                let n = n.to_u32().ok_or_else(|| self.error_at(caret, "exponent too large"))?;
                self.next();
                Ok(n)
            }
            _ => Err(self.error_at(caret, "expected an exponent after '^'")),
        }
    }

    /// `[-] int [/ int]`.
    fn rational(&mut self) -> Result<BigRational, ChowError> {
        let negative = if self.at_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let (num, _) = self.expect_int()?;
        let value = if self.at_sym('/') {
            let slash = self.next();
            let (den, _) = self.expect_int()?;
            if den.is_zero() {
                return Err(self.error_at(&slash, "zero denominator"));
            }
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        };
        Ok(if negative { -value } else { value })
    }
}

/// `name[^e] (* name[^e])*` as an exponent vector over the declared names.
fn monomial(cur: &mut Cursor, names: &[String]) -> Result<Vec<u32>, ChowError> {
    let mut exps = vec![0u32; names.len()];
    loop {
        let (name, tok) = cur.expect_ident()?;
        let idx = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| cur.error_at(&tok, format!("unknown generator '{name}'")))?;
        let e = if cur.at_sym('^') {
            let caret = cur.next();
            cur.exponent(&caret)?
        } else {
            1
        };
        exps[idx] += e;
        if !cur.at_sym('*') {
            return Ok(exps);
        }
        cur.next();
    }
}

pub fn parse_presentation(text: &str) -> Result<RingPresentation, ChowError> {
    let mut cur = Cursor::new(text)?;
    let mut generators: Vec<(String, u32)> = Vec::new();
    let mut relations = Vec::new();
    let mut integrals: Vec<(Vec<u32>, BigRational)> = Vec::new();
    let mut cover = None;
    loop {
        let (keyword, kw_tok) = match cur.peek().tok {
            Tok::End => break,
            _ => cur.expect_ident()?,
        };
        let names: Vec<String> = generators.iter().map(|g| g.0.clone()).collect();
        match keyword.as_str() {
            "gen" => {
                let (name, tok) = cur.expect_ident()?;
                if names.contains(&name) {
                    return Err(cur.error_at(&tok, format!("generator '{name}' declared twice")));
                }
                if !relations.is_empty() || !integrals.is_empty() {
                    return Err(cur.error_at(&kw_tok, "generators must be declared first"));
                }
                cur.expect_sym(':')?;
                let (deg, deg_tok) = cur.expect_int()?;
                let deg = deg.to_u32().ok_or_else(|| cur.error_at(&deg_tok, "degree out of range"))?;
                if deg == 0 {
                    return Err(ChowError::Degree(format!("generator '{name}' has degree 0")));
                }
                generators.push((name, deg));
            }
            "rel" => relations.push(monomial(&mut cur, &names)?),
            "int" => {
                let m = monomial(&mut cur, &names)?;
                cur.expect_sym('=')?;
                integrals.push((m, cur.rational()?));
            }
            "cover" => {
                let (n, tok) = cur.expect_int()?;
                if n <= BigInt::zero() {
                    return Err(cur.error_at(&tok, "cover degree must be positive"));
                }
                cover = Some(n);
            }
            other => return Err(cur.error_at(&kw_tok, format!("unknown statement '{other}'"))),
        }
        cur.expect_sym(';')?;
    }
    RingPresentation::new(generators, relations, integrals, cover.unwrap_or_else(BigInt::one))
}

/// Parses an intersection expression in the generators of `ring`; the
/// result is reduced.
pub fn parse_expression(text: &str, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    let mut cur = Cursor::new(text)?;
    let class = sum(&mut cur, ring)?;
    let t = cur.peek().clone();
    if t.tok != Tok::End {
        return Err(cur.error_at(&t, "unexpected input after expression"));
    }
    Ok(class)
}

fn sum(cur: &mut Cursor, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    let mut acc = product(cur, ring)?;
    while cur.at_sym('+') || cur.at_sym('-') {
        let op = cur.next();
        let rhs = product(cur, ring)?;
        acc = if op.tok == Tok::Sym('+') { acc.add(&rhs) } else { acc.add(&rhs.neg()) };
    }
    Ok(acc)
}

fn product(cur: &mut Cursor, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    let mut acc = unary(cur, ring)?;
    while cur.at_sym('*') {
        cur.next();
        let rhs = unary(cur, ring)?;
        acc = ring.mul(&acc, &rhs);
    }
    Ok(acc)
}

fn unary(cur: &mut Cursor, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    if cur.at_sym('-') {
        cur.next();
        return Ok(unary(cur, ring)?.neg());
    }
    power(cur, ring)
}

fn power(cur: &mut Cursor, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    let base = primary(cur, ring)?;
    if cur.at_sym('^') {
        let caret = cur.next();
        let e = cur.exponent(&caret)?;
        return Ok(ring.pow(&base, e));
    }
    Ok(base)
}

fn primary(cur: &mut Cursor, ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    let t = cur.peek().clone();
    match &t.tok {
        Tok::Int(_) => Ok(ring.constant(cur.rational()?)),
        Tok::Ident(name) => {
            cur.next();
            ring.generator(name).ok_or_else(|| cur.error_at(&t, format!("unknown generator '{name}'")))
        }
        Tok::Sym('(') => {
            cur.next();
            let inner = sum(cur, ring)?;
            cur.expect_sym(')')?;
            Ok(inner)
        }
        Tok::End => Err(cur.error_at(&t, "unexpected end of input")),
        Tok::Sym(c) => Err(cur.error_at(&t, format!("unexpected '{c}'"))),
    }
}

/// `h^3*t^2`-style rendering of an exponent vector; `1` for the unit.
pub(super) fn format_monomial(names: &[(String, u32)], exps: &[u32]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|((n, _), &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub(super) type Terms = BTreeMap<Vec<u32>, BigRational>;
