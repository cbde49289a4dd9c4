use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numbers::{format_rational, Rational};

/// Exact univariate polynomial with rational coefficients.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    var: String,
    coeffs: BTreeMap<u32, Rational>,
}

impl Poly {
    pub fn zero(var: impl Into<String>) -> Self {
        Poly {
            var: var.into(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(var: impl Into<String>, c: Rational) -> Self {
        Self::monomial(var, c, 0)
    }

    pub fn monomial(var: impl Into<String>, c: Rational, exp: u32) -> Self {
        let mut p = Self::zero(var);
        p.set_coeff(exp, c);
        p
    }

    /// From a dense coefficient list, lowest degree first.
    pub fn from_coeffs(var: impl Into<String>, coeffs: impl IntoIterator<Item = Rational>) -> Self {
        let mut p = Self::zero(var);
        for (e, c) in coeffs.into_iter().enumerate() {
            p.set_coeff(e as u32, c);
        }
        p
    }

    pub fn from_integers(var: impl Into<String>, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            var,
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c))),
        )
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(mut self, var: impl Into<String>) -> Self {
        self.var = var.into();
        self
    }

    pub fn set_coeff(&mut self, exp: u32, c: Rational) {
        if c.is_zero() {
            self.coeffs.remove(&exp);
        } else {
            self.coeffs.insert(exp, c);
        }
    }

    pub fn coeff(&self, exp: u32) -> Rational {
        self.coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Dense coefficients `0..=degree`; empty for the zero polynomial.
    pub fn dense(&self) -> Vec<Rational> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|e| self.coeff(e)).collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn map_coeffs<E>(
        &self,
        mut f: impl FnMut(u32, &Rational) -> Result<Rational, E>,
    ) -> Result<Poly, E> {
        let mut out = Poly::zero(self.var.clone());
        for (e, c) in &self.coeffs {
            out.set_coeff(*e, f(*e, c)?);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        let mut out = Poly::zero(self.var.clone());
        for (e, c) in &self.coeffs {
            out.set_coeff(*e, c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.var.clone(), Rational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        if let Some(d) = self.degree() {
            for e in (0..=d).rev() {
                acc = acc * x + self.coeff(e);
            }
        }
        acc
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            let v = out.coeff(*e) + c;
            out.set_coeff(*e, v);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                *acc.entry(ea + eb).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        let mut out = Poly::zero(self.var.clone());
        for (e, c) in acc {
            out.set_coeff(e, c);
        }
        out
    }
}

/// Prints in the input grammar, lowest degree first: `2*n - 3*n^2 + n^3`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let power = match e {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{}", self.var, e),
            };
            if *e == 0 {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&power)?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), power)?;
            }
        }
        Ok(())
    }
}
