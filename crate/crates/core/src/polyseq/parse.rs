//! Tokenizer and recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' uint)?          -- powers bind to numbers and the variable only
//! atom   := integer | integer '/' integer | var | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::Poly;
use crate::numbers::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let ch = bytes[pos] as char;
        if ch.is_ascii_whitespace() {
            pos += 1;
        } else if ch.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            out.push((start, Tok::Int(text[start..pos].parse().expect("digits"))));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((start, Tok::Ident(text[start..pos].to_string())));
        } else if "+-*/^()!,".contains(ch) {
            out.push((pos, Tok::Sym(ch)));
            pos += 1;
        } else {
            return Err(ParseError::new(pos, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('('))
        )
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') || self.starts_factor() {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let (atom, parenthesized) = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            let caret = self.pos();
            self.at += 1;
            if parenthesized {
                return Err(ParseError::new(
                    caret,
                    "powers of parenthesized expressions are not supported; expand the product first",
                ));
            }
            let exp_pos = self.pos();
            match self.peek().cloned() {
                Some(Tok::Int(e)) => {
                    self.at += 1;
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| ParseError::new(exp_pos, "exponent too large"))?;
                    return Ok(atom.pow(e));
                }
                _ => {
                    return Err(ParseError::new(
                        exp_pos,
                        "expected a non-negative integer exponent",
                    ))
                }
            }
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<(Poly, bool), ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut value = Rational::from_integer(n);
                if self.eat('/') {
                    let den_pos = self.pos();
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.at += 1;
                            value /= Rational::from_integer(d);
                        }
                        Some(Tok::Int(_)) => {
                            return Err(ParseError::new(den_pos, "division by zero"))
                        }
                        _ => {
                            return Err(ParseError::new(den_pos, "expected an integer denominator"))
                        }
                    }
                }
                Ok((Poly::constant(self.var, value), false))
            }
            Some(Tok::Ident(name)) => {
                if name != self.var {
                    return Err(ParseError::new(
                        pos,
                        format!(
                            "unknown identifier {name:?} (the polynomial variable is {:?})",
                            self.var
                        ),
                    ));
                }
                self.at += 1;
                Ok((Poly::monomial(self.var, Rational::one(), 1), false))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::new(self.pos(), "expected ')'"));
                }
                Ok((inner, true))
            }
            Some(t) => Err(ParseError::new(pos, format!("unexpected token {t:?}"))),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }
}

/// Parses polynomial text in the variable `var`.
pub fn parse_poly(text: &str, var: &str) -> Result<Poly, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        var,
    };
    let poly = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ParseError::new(p.pos(), "unexpected trailing input"));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    #[test]
    fn parses_expanded_falling_factorial() {
        let p = parse_poly("2*n - 3*n^2 + n^3", "n").unwrap();
        assert_eq!(p, Poly::from_integers("n", &[0, 2, -3, 1]));
        assert_eq!(p.to_string(), "2*n - 3*n^2 + n^3");
    }

    #[test]
    fn zero_and_constants() {
        assert!(parse_poly("0", "x").unwrap().is_zero());
        assert!(parse_poly("x - x", "x").unwrap().is_zero());
        assert_eq!(parse_poly(" 7 ", "x").unwrap(), Poly::constant("x", rat(7)));
    }

    #[test]
    fn rationals_products_and_unary_minus() {
        let p = parse_poly("1/3*n^3 - 1/2 n^2 + 1/6*n", "n").unwrap();
        assert_eq!(p.coeff(3), ratio(1, 3));
        assert_eq!(p.coeff(2), ratio(-1, 2));
        let q = parse_poly("(n+1)(n+2)", "n").unwrap();
        assert_eq!(q, Poly::from_integers("n", &[2, 3, 1]));
        let r = parse_poly("-(-n + 1)", "n").unwrap();
        assert_eq!(r, Poly::from_integers("n", &[-1, 1]));
    }

    #[test]
    fn rejects_parenthesized_power() {
        let err = parse_poly("(1-z)^2", "z").unwrap_err();
        assert_eq!(err.position, 5);
    }

    #[test]
    fn reports_unknown_identifier_and_position() {
        let err = parse_poly("n + m", "n").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.message.contains("unknown identifier"));
        assert!(parse_poly("n +", "n").is_err());
        assert!(parse_poly("n ^ x", "n").is_err());
        assert!(parse_poly("1/0", "n").is_err());
        assert!(parse_poly("n)", "n").is_err());
        assert!(parse_poly("n $ 2", "n").is_err());
    }
}
