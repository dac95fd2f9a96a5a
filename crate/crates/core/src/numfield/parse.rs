//! Text form of field elements.
//!
//! Printing is canonical: the rational part first, then `c*sqrt(d)` terms by
//! increasing `d`, e.g. `3/2 + 5/7*sqrt(2) - 1*sqrt(6)`. Parsing accepts
//! that form and, more generally, any expression built from integer and
//! decimal literals, `sqrt(n)`, parentheses and `+ - * /`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::FieldElement;
use crate::error::{Error, Result};

/// Largest accepted `sqrt` argument; factoring is by trial division.
pub const MAX_SQRT_ARG: u64 = 1_000_000_000_000;
const MAX_DEPTH: usize = 64;
const MAX_LITERAL_DIGITS: usize = 512;
const MAX_TERMS: usize = 256;

fn write_rational(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (key, c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_rational(f, &mag)?;
            if !key.is_one() {
                write!(f, "*sqrt({})", key.value())?;
            }
        }
        Ok(())
    }
}

impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::parse(p.pos, "unexpected trailing input"));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn check_size(&self, v: &FieldElement) -> Result<()> {
        if v.num_terms() > MAX_TERMS {
            return Err(Error::SizeLimit {
                what: "terms in parsed element",
                count: v.num_terms() as u128,
                limit: MAX_TERMS as u128,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => break,
            }
            self.check_size(&acc)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).map_err(|_| Error::parse(at, "division by zero"))?;
                }
                _ => break,
            }
            self.check_size(&acc)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FieldElement> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::parse(self.pos, "expression nested too deeply"));
        }
        let out = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.unary().map(|v| -v)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        };
        self.depth -= 1;
        out
    }

    fn primary(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(Error::parse(self.pos, "expression nested too deeply"));
                }
                let v = self.expr()?;
                self.depth -= 1;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number().map(FieldElement::from_rational),
            Some(b's') => {
                if !self.src[self.pos..].starts_with(b"sqrt") {
                    return Err(Error::parse(self.pos, "unknown identifier"));
                }
                self.pos += 4;
                self.expect(b'(')?;
                self.skip_ws();
                let at = self.pos;
                let arg = self.number()?;
                if !arg.is_integer() || arg.is_negative() {
                    return Err(Error::parse(at, "sqrt argument must be a nonnegative integer"));
                }
                let n: u64 = arg
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|&n| n <= MAX_SQRT_ARG)
                    .ok_or_else(|| Error::parse(at, format!("sqrt argument exceeds {MAX_SQRT_ARG}")))?;
                self.expect(b')')?;
                Ok(FieldElement::sqrt(n))
            }
            Some(_) => Err(Error::parse(self.pos, "unexpected character")),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<BigRational> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            &p.src[s..p.pos]
        };
        let int_part = digits(self).to_vec();
        let mut frac_part = Vec::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_part = digits(self).to_vec();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::parse(start, "expected a number"));
        }
        if int_part.len() + frac_part.len() > MAX_LITERAL_DIGITS {
            return Err(Error::parse(start, "numeric literal too long"));
        }
        let mut all = int_part;
        all.extend_from_slice(&frac_part);
        let numer = if all.is_empty() {
            BigInt::zero()
        } else {
            BigInt::parse_bytes(&all, 10).ok_or_else(|| Error::parse(start, "bad number"))?
        };
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(BigRational::new(numer, denom))
    }
}

/// Parses a coordinate vector such as `(1, sqrt(2), -1/2)`.
pub fn parse_vector(s: &str) -> Result<Vec<FieldElement>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::parse(0, "vector must be enclosed in parentheses"))?;
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::parse(i + 1, "unbalanced parenthesis"))?
            }
            ',' if depth == 0 => {
                parts.push((start, &inner[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &inner[start..]));
    if parts.len() == 1 && parts[0].1.trim().is_empty() {
        return Err(Error::parse(1, "vector must have at least one coordinate"));
    }
    parts
        .into_iter()
        .map(|(offset, p)| {
            p.parse::<FieldElement>().map_err(|e| match e {
                Error::Parse { pos, msg } => Error::parse(offset + 1 + pos, msg),
                other => other,
            })
        })
        .collect()
}

pub fn format_vector(v: &[FieldElement]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}
