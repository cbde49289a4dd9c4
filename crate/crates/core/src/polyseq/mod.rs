//! Polynomial sequences and the transforms applied before factor search.

mod guess;
mod parse;
mod poly;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use guess::{AffineJI, GuessError, GuessExpr};
pub use parse::{parse_poly, ParseError};
pub use poly::Poly;

use crate::numbers::{factorial, int_to_rat, Rational};
use crate::triangles::{build_triangle, builtin_spec, BuiltinTriangle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolySeqError {
    #[error("a polynomial sequence needs at least one polynomial")]
    Empty,
    #[error("polynomial {index} uses variable {found:?}, expected {expected:?}")]
    MixedVariables {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("user guess function failed at (j={j}, i={i}): {source}")]
    Guess { j: i64, i: u32, source: GuessError },
    #[error("cannot normalize by j! at negative index j={0}")]
    NegativeIndex(i64),
}

/// A transform that was applied to the raw input, kept so reports can state
/// which sequence a formula describes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Normalization {
    UserGuess {
        expr: String,
    },
    ClearDenominators {
        #[serde(with = "crate::numbers::serde_rational_vec")]
        multipliers: Vec<Rational>,
    },
    ByJFactorial,
    ByIFactorial,
    ByBothFactorials,
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Normalization::UserGuess { expr } => {
                write!(f, "coefficients multiplied by U(j, i) = {expr}")
            }
            Normalization::ClearDenominators { multipliers } => {
                let m: Vec<String> = multipliers
                    .iter()
                    .map(crate::numbers::format_rational)
                    .collect();
                write!(
                    f,
                    "p_j multiplied by coefficient-denominator LCMs [{}]",
                    m.join(", ")
                )
            }
            Normalization::ByJFactorial => f.write_str("p_j multiplied by j!"),
            Normalization::ByIFactorial => f.write_str("coefficient of x^i multiplied by i!"),
            Normalization::ByBothFactorials => {
                f.write_str("coefficient of x^i multiplied by j! * i!")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentialMode {
    ByJFactorial,
    ByIFactorial,
    ByBoth,
}

/// `p_start, p_{start+1}, ...` in a shared variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySeq {
    polys: Vec<Poly>,
    start_index: i64,
    var: String,
    normalization: Vec<Normalization>,
}

impl PolySeq {
    pub fn new(polys: Vec<Poly>, start_index: i64) -> Result<Self, PolySeqError> {
        let var = polys.first().ok_or(PolySeqError::Empty)?.var().to_string();
        if let Some((index, p)) = polys.iter().enumerate().find(|(_, p)| p.var() != var) {
            return Err(PolySeqError::MixedVariables {
                index,
                expected: var,
                found: p.var().to_string(),
            });
        }
        Ok(PolySeq {
            polys,
            start_index,
            var,
            normalization: Vec::new(),
        })
    }

    /// Parses each text in `var`.
    pub fn parse(texts: &[&str], var: &str, start_index: i64) -> Result<Self, ParseError> {
        let polys = texts
            .iter()
            .map(|t| parse_poly(t, var))
            .collect::<Result<Vec<_>, _>>()?;
        if polys.is_empty() {
            return Err(ParseError::new(0, "no polynomials given"));
        }
        Ok(PolySeq::new(polys, start_index).expect("shared variable"))
    }

    /// Builds `p_j` for `j in range` from a generator.
    pub fn from_fn(
        var: &str,
        range: std::ops::RangeInclusive<i64>,
        f: impl Fn(i64) -> Poly,
    ) -> Self {
        let start = *range.start();
        let polys = range.map(|j| f(j).with_var(var)).collect();
        PolySeq::new(polys, start).expect("non-empty range")
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn normalization(&self) -> &[Normalization] {
        &self.normalization
    }

    /// `(j, p_j)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, &Poly)> {
        self.polys
            .iter()
            .enumerate()
            .map(move |(k, p)| (self.start_index + k as i64, p))
    }

    pub fn is_integral(&self) -> bool {
        self.polys.iter().all(Poly::is_integral)
    }

    fn transformed(&self, polys: Vec<Poly>, step: Normalization) -> PolySeq {
        let mut normalization = self.normalization.clone();
        normalization.push(step);
        PolySeq {
            polys,
            start_index: self.start_index,
            var: self.var.clone(),
            normalization,
        }
    }
}

/// Multiplies each nonzero coefficient `c_{j,i}` by `u(j, i)`.
pub fn apply_user_guess(seq: &PolySeq, u: &GuessExpr) -> Result<PolySeq, PolySeqError> {
    let polys = seq
        .indexed()
        .map(|(j, p)| {
            p.map_coeffs(|i, c| {
                u.eval(j, i as i64)
                    .map(|f| c * f)
                    .map_err(|source| PolySeqError::Guess { j, i, source })
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(seq.transformed(
        polys,
        Normalization::UserGuess {
            expr: u.to_string(),
        },
    ))
}

/// Scales each `p_j` by the LCM of its coefficient denominators.
pub fn clear_denominators_lcm(seq: &PolySeq) -> (PolySeq, Vec<Rational>) {
    let multipliers: Vec<Rational> = seq
        .polys
        .iter()
        .map(|p| {
            let l = p.terms().fold(BigInt::one(), |acc, (_, c)| {
                crate::numbers::lcm(&acc, c.denom())
            });
            int_to_rat(&l)
        })
        .collect();
    let polys = seq
        .polys
        .iter()
        .zip(&multipliers)
        .map(|(p, m)| p.scale(m))
        .collect();
    let out = seq.transformed(
        polys,
        Normalization::ClearDenominators {
            multipliers: multipliers.clone(),
        },
    );
    (out, multipliers)
}

pub fn normalize_exponential(
    seq: &PolySeq,
    mode: ExponentialMode,
) -> Result<PolySeq, PolySeqError> {
    let polys = seq
        .indexed()
        .map(|(j, p)| {
            let jf = match mode {
                ExponentialMode::ByIFactorial => Rational::one(),
                _ if j < 0 => return Err(PolySeqError::NegativeIndex(j)),
                _ => int_to_rat(&factorial(j as u64)),
            };
            p.map_coeffs(|i, c| {
                let f = match mode {
                    ExponentialMode::ByJFactorial => jf.clone(),
                    _ => &jf * int_to_rat(&factorial(i as u64)),
                };
                Ok(c * f)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let step = match mode {
        ExponentialMode::ByJFactorial => Normalization::ByJFactorial,
        ExponentialMode::ByIFactorial => Normalization::ByIFactorial,
        ExponentialMode::ByBoth => Normalization::ByBothFactorials,
    };
    Ok(seq.transformed(polys, step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    MonomialToFalling,
    FallingToMonomial,
}

/// Converts coefficients between the monomial basis `x^k` and the falling
/// factorial basis `x(x-1)...(x-k+1)`. For `FallingToMonomial` the input's
/// coefficients are read as falling-basis coordinates.
pub fn change_basis(poly: &Poly, direction: BasisDirection) -> Vec<Rational> {
    let Some(deg) = poly.degree() else {
        return Vec::new();
    };
    let rows = deg as usize + 1;
    let table = match direction {
        BasisDirection::MonomialToFalling => {
            build_triangle(&builtin_spec(BuiltinTriangle::S2), rows)
        }
        BasisDirection::FallingToMonomial => {
            build_triangle(&builtin_spec(BuiltinTriangle::S1signed), rows)
        }
    };
    let mut out = vec![Rational::zero(); rows];
    for (n, c) in poly.terms() {
        for (k, slot) in out.iter_mut().enumerate().take(n as usize + 1) {
            let t = table.entry(n as i64, k as i64).expect("row in range");
            if !t.is_zero() {
                *slot += c * int_to_rat(t);
            }
        }
    }
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

/// Checks every coefficient is an integer, returning the first offender.
pub fn first_non_integer(seq: &PolySeq) -> Option<(i64, u32, Rational)> {
    seq.indexed().find_map(|(j, p)| {
        p.terms()
            .find(|(_, c)| !c.is_integer())
            .map(|(i, c)| (j, i, c.clone()))
    })
}

pub(crate) fn integer_rows(seq: &PolySeq) -> Vec<(i64, Vec<BigInt>)> {
    seq.indexed()
        .map(|(j, p)| (j, p.dense().into_iter().map(|c| c.to_integer()).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    fn binomial(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, t| acc * (n - t) / (t + 1))
    }

    #[test]
    fn user_guess_multiplies_nonzero_coefficients() {
        let seq = PolySeq::from_fn("n", 1..=5, |j| {
            Poly::from_integers("n", &(0..=j).map(|i| binomial(j, i)).collect::<Vec<_>>())
        });
        let out = apply_user_guess(&seq, &GuessExpr::factorial_of_i()).unwrap();
        for (j, p) in out.indexed() {
            for i in 0..=j {
                let expect = binomial(j, i) * (1..=i).product::<i64>();
                assert_eq!(p.coeff(i as u32), rat(expect));
            }
        }
        assert_eq!(seq.normalization().len(), 0);
        assert_eq!(out.normalization().len(), 1);

        let same = apply_user_guess(&seq, &GuessExpr::one()).unwrap();
        assert_eq!(same.polys(), seq.polys());
    }

    #[test]
    fn user_guess_cancels_egf_denominators() {
        // sum_s C(m, s) z^s / s!
        let seq = PolySeq::from_fn("z", 1..=5, |m| {
            Poly::from_coeffs(
                "z",
                (0..=m).map(|s| ratio(binomial(m, s), (1..=s).product::<i64>())),
            )
        });
        assert!(!seq.is_integral());
        let out = apply_user_guess(&seq, &GuessExpr::parse("factorial(i)").unwrap()).unwrap();
        assert!(out.is_integral());
        assert_eq!(out.polys()[3].coeff(2), rat(binomial(4, 2)));
    }

    #[test]
    fn user_guess_errors_propagate() {
        let seq = PolySeq::parse(&["1 + x"], "x", 0).unwrap();
        let err = apply_user_guess(&seq, &GuessExpr::parse("(j - i)!").unwrap()).unwrap_err();
        assert!(matches!(err, PolySeqError::Guess { j: 0, i: 1, .. }));
    }

    #[test]
    fn clears_faulhaber_denominators() {
        let seq = PolySeq::parse(&["1/3*n^3 - 1/2*n^2 + 1/6*n", "n^2 + 1", "0"], "n", 2).unwrap();
        let (out, m) = clear_denominators_lcm(&seq);
        assert_eq!(m, vec![rat(6), rat(1), rat(1)]);
        assert_eq!(out.polys()[0], Poly::from_integers("n", &[0, 1, -3, 2]));
        assert_eq!(out.polys()[1], seq.polys()[1]);
        assert!(out.polys()[2].is_zero());
        for ((p, q), mult) in out.polys().iter().zip(seq.polys()).zip(&m) {
            assert_eq!(&p.scale(&mult.recip()), q);
        }
    }

    #[test]
    fn exponential_normalizations() {
        let seq = PolySeq::parse(&["3 + x", "1 + x", "1/2*x"], "x", 0).unwrap();
        let by_i = normalize_exponential(&seq, ExponentialMode::ByIFactorial).unwrap();
        assert_eq!(by_i.polys()[2].coeff(1), ratio(1, 2));
        let by_j = normalize_exponential(&seq, ExponentialMode::ByJFactorial).unwrap();
        assert_eq!(by_j.polys()[0], seq.polys()[0]);
        let both = normalize_exponential(&seq, ExponentialMode::ByBoth).unwrap();
        assert_eq!(both.polys()[2].coeff(1), rat(1));

        let neg = PolySeq::parse(&["x"], "x", -1).unwrap();
        assert!(normalize_exponential(&neg, ExponentialMode::ByJFactorial).is_err());
        assert!(normalize_exponential(&neg, ExponentialMode::ByIFactorial).is_ok());
    }

    #[test]
    fn basis_change_examples() {
        let x2 = Poly::from_integers("x", &[0, 0, 1]);
        assert_eq!(
            change_basis(&x2, BasisDirection::MonomialToFalling),
            vec![rat(0), rat(1), rat(1)]
        );
        assert_eq!(
            change_basis(&x2, BasisDirection::FallingToMonomial),
            vec![rat(0), rat(-1), rat(1)]
        );
        let five = Poly::constant("x", rat(5));
        assert_eq!(
            change_basis(&five, BasisDirection::MonomialToFalling),
            vec![rat(5)]
        );
        assert_eq!(
            change_basis(&five, BasisDirection::FallingToMonomial),
            vec![rat(5)]
        );
        assert!(change_basis(&Poly::zero("x"), BasisDirection::MonomialToFalling).is_empty());
    }

    #[test]
    fn mixed_variables_rejected() {
        let err = PolySeq::new(vec![Poly::zero("x"), Poly::zero("y")], 0).unwrap_err();
        assert!(matches!(err, PolySeqError::MixedVariables { index: 1, .. }));
        assert_eq!(PolySeq::new(vec![], 0).unwrap_err(), PolySeqError::Empty);
    }
}
