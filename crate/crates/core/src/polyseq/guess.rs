//! User guess functions `U(j, i)`: a small exact expression language over the
//! sequence index `j` and the summation index `i`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::parse::{tokenize, ParseError, Tok};
use crate::numbers::{factorial, format_rational, rational_pow, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("factorial of negative argument {0}")]
    NegativeFactorial(i64),
    #[error("division by zero")]
    DivisionByZero,
}

/// `constant + j_coeff * j + i_coeff * i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AffineJI {
    pub constant: i64,
    pub j_coeff: i64,
    pub i_coeff: i64,
}

impl AffineJI {
    pub fn eval(&self, j: i64, i: i64) -> i64 {
        self.constant + self.j_coeff * j + self.i_coeff * i
    }
}

impl fmt::Display for AffineJI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::linear_text(
            &[(self.j_coeff, "j"), (self.i_coeff, "i")],
            self.constant,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuessExpr {
    Int(BigInt),
    Rat(Rational),
    J,
    I,
    Neg(Box<GuessExpr>),
    Add(Box<GuessExpr>, Box<GuessExpr>),
    Sub(Box<GuessExpr>, Box<GuessExpr>),
    Mul(Box<GuessExpr>, Box<GuessExpr>),
    Div(Box<GuessExpr>, Box<GuessExpr>),
    Pow(Box<GuessExpr>, i32),
    Factorial(AffineJI),
    /// `base ^ (affine)`.
    PowAffine(Box<GuessExpr>, AffineJI),
}

impl GuessExpr {
    pub fn one() -> Self {
        GuessExpr::Int(BigInt::one())
    }

    pub fn factorial_of_i() -> Self {
        GuessExpr::Factorial(AffineJI {
            i_coeff: 1,
            ..Default::default()
        })
    }

    pub fn times(self, other: GuessExpr) -> Self {
        GuessExpr::Mul(Box::new(self), Box::new(other))
    }

    pub fn eval(&self, j: i64, i: i64) -> Result<Rational, GuessError> {
        use GuessExpr::*;
        Ok(match self {
            Int(n) => Rational::from_integer(n.clone()),
            Rat(r) => r.clone(),
            J => Rational::from_integer(j.into()),
            I => Rational::from_integer(i.into()),
            Neg(a) => -a.eval(j, i)?,
            Add(a, b) => a.eval(j, i)? + b.eval(j, i)?,
            Sub(a, b) => a.eval(j, i)? - b.eval(j, i)?,
            Mul(a, b) => a.eval(j, i)? * b.eval(j, i)?,
            Div(a, b) => {
                let d = b.eval(j, i)?;
                if d.is_zero() {
                    return Err(GuessError::DivisionByZero);
                }
                a.eval(j, i)? / d
            }
            Pow(a, e) => {
                rational_pow(&a.eval(j, i)?, *e as i64).ok_or(GuessError::DivisionByZero)?
            }
            Factorial(arg) => {
                let n = arg.eval(j, i);
                if n < 0 {
                    return Err(GuessError::NegativeFactorial(n));
                }
                Rational::from_integer(factorial(n as u64))
            }
            PowAffine(a, e) => {
                rational_pow(&a.eval(j, i)?, e.eval(j, i)).ok_or(GuessError::DivisionByZero)?
            }
        })
    }

    /// Structural affine form, when the expression is one.
    fn as_affine(&self) -> Option<AffineJI> {
        use GuessExpr::*;
        let lin = |a: AffineJI, s: i64| AffineJI {
            constant: a.constant * s,
            j_coeff: a.j_coeff * s,
            i_coeff: a.i_coeff * s,
        };
        let sum = |a: AffineJI, b: AffineJI| AffineJI {
            constant: a.constant + b.constant,
            j_coeff: a.j_coeff + b.j_coeff,
            i_coeff: a.i_coeff + b.i_coeff,
        };
        let constant = |a: &AffineJI| (a.j_coeff == 0 && a.i_coeff == 0).then_some(a.constant);
        match self {
            Int(n) => Some(AffineJI {
                constant: n.try_into().ok()?,
                ..Default::default()
            }),
            Rat(r) if r.is_integer() => Some(AffineJI {
                constant: r.numer().try_into().ok()?,
                ..Default::default()
            }),
            Rat(_) => None,
            J => Some(AffineJI {
                j_coeff: 1,
                ..Default::default()
            }),
            I => Some(AffineJI {
                i_coeff: 1,
                ..Default::default()
            }),
            Neg(a) => Some(lin(a.as_affine()?, -1)),
            Add(a, b) => Some(sum(a.as_affine()?, b.as_affine()?)),
            Sub(a, b) => Some(sum(a.as_affine()?, lin(b.as_affine()?, -1))),
            Mul(a, b) => {
                let (a, b) = (a.as_affine()?, b.as_affine()?);
                match (constant(&a), constant(&b)) {
                    (Some(c), _) => Some(lin(b, c)),
                    (_, Some(c)) => Some(lin(a, c)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Parses e.g. `i!`, `factorial(j - i)`, `1/factorial(i)`, `2^(j+1) * (j-i)!`.
    pub fn parse(text: &str) -> Result<GuessExpr, ParseError> {
        let toks = tokenize(text)?;
        let mut p = GuessParser {
            toks,
            at: 0,
            end: text.len(),
        };
        let e = p.expr()?;
        if p.at != p.toks.len() {
            return Err(ParseError::new(p.pos(), "unexpected trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for GuessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GuessExpr::*;
        match self {
            Int(n) => write!(f, "{n}"),
            Rat(r) => write!(f, "({})", format_rational(r)),
            J => f.write_str("j"),
            I => f.write_str("i"),
            Neg(a) => write!(f, "-({a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "{a} * {b}"),
            Div(a, b) => write!(f, "{a} / ({b})"),
            Pow(a, e) => write!(f, "({a})^({e})"),
            Factorial(a) => write!(f, "factorial({a})"),
            PowAffine(a, e) => write!(f, "({a})^({e})"),
        }
    }
}

struct GuessParser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl GuessParser {
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

    fn expr(&mut self) -> Result<GuessExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = GuessExpr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = GuessExpr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GuessExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = GuessExpr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = GuessExpr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<GuessExpr, ParseError> {
        if self.eat('-') {
            return Ok(GuessExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<GuessExpr, ParseError> {
        let base = self.postfix()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let negative = self.eat('-');
        if let Some(Tok::Int(n)) = self.peek().cloned() {
            self.at += 1;
            let e: i32 = n
                .try_into()
                .map_err(|_| ParseError::new(pos, "exponent too large"))?;
            return Ok(GuessExpr::Pow(
                Box::new(base),
                if negative { -e } else { e },
            ));
        }
        let exp = self.postfix()?;
        let exp = if negative {
            GuessExpr::Neg(Box::new(exp))
        } else {
            exp
        };
        let affine = exp
            .as_affine()
            .ok_or_else(|| ParseError::new(pos, "exponent must be affine in j and i"))?;
        Ok(GuessExpr::PowAffine(Box::new(base), affine))
    }

    fn postfix(&mut self) -> Result<GuessExpr, ParseError> {
        let pos = self.pos();
        let e = self.primary()?;
        if self.eat('!') {
            let arg = e.as_affine().ok_or_else(|| {
                ParseError::new(pos, "factorial argument must be affine in j and i")
            })?;
            return Ok(GuessExpr::Factorial(arg));
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<GuessExpr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(GuessExpr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "j" => Ok(GuessExpr::J),
                    "i" => Ok(GuessExpr::I),
                    "factorial" => {
                        if !self.eat('(') {
                            return Err(ParseError::new(
                                self.pos(),
                                "expected '(' after factorial",
                            ));
                        }
                        let arg_pos = self.pos();
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(ParseError::new(self.pos(), "expected ')'"));
                        }
                        let arg = arg.as_affine().ok_or_else(|| {
                            ParseError::new(arg_pos, "factorial argument must be affine in j and i")
                        })?;
                        Ok(GuessExpr::Factorial(arg))
                    }
                    _ => Err(ParseError::new(
                        pos,
                        format!(
                            "unknown identifier {name:?} (guess functions use j, i and factorial)"
                        ),
                    )),
                }
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::new(self.pos(), "expected ')'"));
                }
                Ok(e)
            }
            Some(t) => Err(ParseError::new(pos, format!("unexpected token {t:?}"))),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }
}
