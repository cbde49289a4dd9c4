//! Sequence-based integer factorization: write an integer as a product of
//! triangle entries, one per slot, times an integer remainder.
//!
//! Divisors of the running quotient are looked up in each table's value index.
//! They come from trial division when that is cheaper than scanning the
//! index's distinct values, and from the scan otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::triangles::{EntrySign, Position, TriangleTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("zero cannot be factored; zero coefficients are wildcards")]
    ZeroValue,
    #[error("at least one triangle is required")]
    NoTables,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorEntry {
    pub triangle: String,
    pub n: i64,
    pub k: i64,
    /// Signed entry value.
    pub value: BigInt,
}

/// `value = factors[0].value * ... * factors[r-1].value * remainder`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorDecomposition {
    pub factors: Vec<FactorEntry>,
    pub remainder: BigInt,
}

impl FactorDecomposition {
    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(self.remainder.clone(), |acc, f| acc * &f.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorOptions {
    /// Positions kept per divisor value and slot, in `(n, k)` order.
    pub per_slot_cap: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { per_slot_cap: 64 }
    }
}

impl FactorOptions {
    pub fn uncapped() -> Self {
        FactorOptions {
            per_slot_cap: usize::MAX,
        }
    }
}

/// All decompositions of `value` over `tables`, one entry per table.
pub fn factor_over_triangles(
    value: &BigInt,
    tables: &[&TriangleTable],
) -> Result<Vec<FactorDecomposition>, FactorError> {
    factor_over_triangles_with(value, tables, &FactorOptions::default())
}

/// As [`factor_over_triangles`]. Output order is slot by slot, `(n, k)`
/// ascending within a slot; a cap truncates each divisor class to a prefix.
pub fn factor_over_triangles_with(
    value: &BigInt,
    tables: &[&TriangleTable],
    opts: &FactorOptions,
) -> Result<Vec<FactorDecomposition>, FactorError> {
    if value.is_zero() {
        return Err(FactorError::ZeroValue);
    }
    if tables.is_empty() {
        return Err(FactorError::NoTables);
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(tables.len());
    descend(value, &value.abs(), tables, opts, &mut chosen, &mut out);
    Ok(out)
}

fn descend(
    value: &BigInt,
    rest: &BigInt,
    tables: &[&TriangleTable],
    opts: &FactorOptions,
    chosen: &mut Vec<FactorEntry>,
    out: &mut Vec<FactorDecomposition>,
) {
    let slot = chosen.len();
    if slot == tables.len() {
        let product = chosen.iter().fold(BigInt::one(), |acc, f| acc * &f.value);
        out.push(FactorDecomposition {
            factors: chosen.clone(),
            remainder: value / product,
        });
        return;
    }
    let table = tables[slot];
    for (divisor, pos) in dividing_positions(table, rest, opts.per_slot_cap) {
        let signed = match pos.sign {
            EntrySign::Positive => divisor.clone(),
            EntrySign::Negative => -divisor.clone(),
        };
        chosen.push(FactorEntry {
            triangle: table.spec().name.clone(),
            n: pos.n,
            k: pos.k,
            value: signed,
        });
        descend(value, &(rest / &divisor), tables, opts, chosen, out);
        chosen.pop();
    }
}

/// Positions whose absolute entry divides `target > 0`, sorted by `(n, k)`.
fn dividing_positions(
    table: &TriangleTable,
    target: &BigInt,
    cap: usize,
) -> Vec<(BigInt, Position)> {
    let mut found: Vec<(BigInt, Position)> = Vec::new();
    let mut take = |d: &BigInt, positions: &[Position]| {
        for p in positions.iter().take(cap) {
            found.push((d.clone(), *p));
        }
    };
    let distinct = table.distinct_value_count();
    let small_root = target.sqrt().to_usize().is_some_and(|r| r < distinct);
    if small_root {
        for d in divisors(target) {
            if let Ok(p) = table.value_positions(&d) {
                take(&d, p);
            }
        }
    } else {
        for (v, p) in table.distinct_values() {
            if target.is_multiple_of(v) {
                take(v, p);
            }
        }
    }
    found.sort_by_key(|(_, p)| (p.n, p.k));
    found
}

/// Positive divisors of `n > 0` by trial division up to `sqrt(n)`.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            let q = n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Single-table lookup for one coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientPositions {
    /// The coefficient is zero: any position fits with remainder zero.
    Wildcard,
    Positions(Vec<PositionMatch>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionMatch {
    pub n: i64,
    pub k: i64,
    pub sign: EntrySign,
    pub remainder: BigInt,
}

/// Every position of `table` whose entry divides `value`, with the quotient.
pub fn positions_for_coefficient(value: &BigInt, table: &TriangleTable) -> CoefficientPositions {
    if value.is_zero() {
        return CoefficientPositions::Wildcard;
    }
    let matches = dividing_positions(table, &value.abs(), usize::MAX)
        .into_iter()
        .map(|(d, p)| {
            let signed = if p.sign == EntrySign::Negative { -d } else { d };
            PositionMatch {
                n: p.n,
                k: p.k,
                sign: p.sign,
                remainder: value / signed,
            }
        })
        .collect();
    CoefficientPositions::Positions(matches)
}

/// Number of positions in `table` whose entry divides `value != 0`, capped
/// per divisor class. Used to pick cheap pivots.
pub(crate) fn dividing_position_count(table: &TriangleTable, value: &BigInt, cap: usize) -> usize {
    dividing_positions(table, &value.abs(), cap).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangles::{build_triangle, BuiltinTriangle, TriangleSpec};
    use std::collections::BTreeSet;

    fn table(name: &str) -> TriangleTable {
        build_triangle(&TriangleSpec::builtin(name).unwrap(), 12)
    }

    fn brute_force(value: &BigInt, tables: &[&TriangleTable]) -> BTreeSet<FactorDecomposition> {
        let mut partial: Vec<(Vec<FactorEntry>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        for t in tables {
            let mut next = Vec::new();
            for (fs, prod) in &partial {
                for n in 0..t.num_rows() {
                    for (k, v) in t.row(n).unwrap().iter().enumerate() {
                        if v.is_zero() {
                            continue;
                        }
                        let mut fs = fs.clone();
                        fs.push(FactorEntry {
                            triangle: t.spec().name.clone(),
                            n: n as i64,
                            k: k as i64,
                            value: v.clone(),
                        });
                        next.push((fs, prod * v));
                    }
                }
            }
            partial = next;
        }
        partial
            .into_iter()
            .filter(|(_, p)| value.is_multiple_of(p))
            .map(|(factors, p)| FactorDecomposition {
                factors,
                remainder: value / p,
            })
            .collect()
    }

    #[test]
    fn double_factor_example() {
        let s1 = table("S1");
        let b2 = table("Binom2");
        let out = factor_over_triangles(&BigInt::from(-16), &[&s1, &b2]).unwrap();
        assert!(out.iter().any(|d| d.factors[0].n == 4
            && d.factors[0].k == 4
            && d.factors[1].n == 4
            && d.factors[1].k == 1
            && d.remainder == BigInt::from(-1)));
        assert!(out.iter().all(|d| d.product() == BigInt::from(-16)));
    }

    #[test]
    fn ones_in_binomial() {
        let b = table("Binom");
        let out = factor_over_triangles(&BigInt::one(), &[&b]).unwrap();
        assert_eq!(out.len(), 2 * 12 - 1);
        assert!(out.iter().all(|d| d.remainder.is_one()));
    }

    #[test]
    fn seven_in_s2() {
        let s2 = table("S2");
        let out = factor_over_triangles(&BigInt::from(7), &[&s2]).unwrap();
        assert!(out
            .iter()
            .any(|d| d.factors[0].n == 4 && d.factors[0].k == 2 && d.remainder.is_one()));
    }

    #[test]
    fn coefficient_positions() {
        let s1 = table("S1");
        let CoefficientPositions::Positions(p) = positions_for_coefficient(&BigInt::from(50), &s1)
        else {
            panic!("expected positions");
        };
        let has = |n, k, r: i64| {
            p.iter()
                .any(|m| m.n == n && m.k == k && m.remainder == BigInt::from(r))
        };
        assert!(has(5, 2, 1) && has(5, 4, 5) && has(2, 1, 50));
        assert_eq!(
            positions_for_coefficient(&BigInt::zero(), &s1),
            CoefficientPositions::Wildcard
        );
        let b = table("Binom");
        let CoefficientPositions::Positions(p) = positions_for_coefficient(&BigInt::from(3), &b)
        else {
            panic!("expected positions");
        };
        assert!(p
            .iter()
            .any(|m| m.n == 3 && m.k == 1 && m.remainder.is_one()));
        assert!(p
            .iter()
            .any(|m| m.n == 3 && m.k == 2 && m.remainder.is_one()));
        assert!(p
            .iter()
            .any(|m| m.n == 0 && m.k == 0 && m.remainder == BigInt::from(3)));
    }

    #[test]
    fn signed_entries_push_sign_to_remainder() {
        let s = table("S1signed");
        let out = factor_over_triangles(&BigInt::from(6), &[&s]).unwrap();
        let d = out
            .iter()
            .find(|d| d.factors[0].n == 4 && d.factors[0].k == 1)
            .unwrap();
        assert_eq!(d.factors[0].value, BigInt::from(-6));
        assert_eq!(d.remainder, BigInt::from(-1));
    }

    #[test]
    fn matches_brute_force_small_values() {
        let tables: Vec<TriangleTable> = BuiltinTriangle::ALL
            .iter()
            .map(|b| table(b.name()))
            .collect();
        for v in [-120i64, -7, 1, 2, 12, 35, 97, 720, 1001] {
            let v = BigInt::from(v);
            for t in &tables {
                let fast: BTreeSet<_> =
                    factor_over_triangles_with(&v, &[t], &FactorOptions::uncapped())
                        .unwrap()
                        .into_iter()
                        .collect();
                assert_eq!(fast, brute_force(&v, &[t]), "{} {}", t.spec().name, v);
            }
            let fast: BTreeSet<_> = factor_over_triangles_with(
                &v,
                &[&tables[0], &tables[6]],
                &FactorOptions::uncapped(),
            )
            .unwrap()
            .into_iter()
            .collect();
            assert_eq!(fast, brute_force(&v, &[&tables[0], &tables[6]]));
        }
    }

    #[test]
    fn rejects_zero() {
        let s1 = table("S1");
        assert_eq!(
            factor_over_triangles(&BigInt::zero(), &[&s1]),
            Err(FactorError::ZeroValue)
        );
        assert_eq!(
            factor_over_triangles(&BigInt::one(), &[]),
            Err(FactorError::NoTables)
        );
    }
}
