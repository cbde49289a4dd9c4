//! Triangular sequences generated by the two-term recurrence
//!
//! ```text
//! T(n, k) = (a n + b k + c) T(n-1, k) + (a' n + b' k + c') T(n-1, k-1) + [n = k = 0]
//! ```
//!
//! plus the built-in triangles (Stirling, Eulerian, binomial variants) and a
//! value index used by the factorizer to look entries up by absolute value.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("unknown triangle id {0:?} (expected one of S1, S1signed, S2, E1, E2, Binom, Binom2, BinomSym)")]
    UnknownTriangle(String),
    #[error("row {n} is outside the materialized rows 0..{num_rows} of triangle {name}")]
    RowOutOfRange {
        name: String,
        n: i64,
        num_rows: usize,
    },
    #[error("zero has no value-index entry; zero coefficients are wildcards")]
    ZeroValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    AsIs,
    Unsigned,
}

/// Triangles that are not themselves two-term recurrences but transforms of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedTransform {
    /// `T(n, k) = B(n, k)^2`.
    Squared,
    /// `T(n, k) = B(n + k, k)`.
    SymmetricIndex,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub name: String,
    /// `(a, b, c, a', b', c')` of the recurrence.
    pub params: [i64; 6],
    pub sign_mode: SignMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedTransform>,
}

impl TriangleSpec {
    pub fn new(name: impl Into<String>, params: [i64; 6]) -> Self {
        TriangleSpec {
            name: name.into(),
            params,
            sign_mode: SignMode::AsIs,
            derived: None,
        }
    }

    pub fn with_sign_mode(mut self, sign_mode: SignMode) -> Self {
        self.sign_mode = sign_mode;
        self
    }

    /// Looks up a built-in triangle by its id.
    pub fn builtin(name: &str) -> Result<Self, TriangleError> {
        name.parse::<BuiltinTriangle>().map(builtin_spec)
    }

    /// Whether the entries coincide with another spec for every row count.
    pub fn same_entries(&self, other: &TriangleSpec) -> bool {
        self.params == other.params
            && self.sign_mode == other.sign_mode
            && self.derived == other.derived
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinTriangle {
    /// Unsigned Stirling numbers of the first kind.
    S1,
    S1signed,
    /// Stirling numbers of the second kind.
    S2,
    /// First-order Eulerian numbers.
    E1,
    /// Second-order Eulerian numbers.
    E2,
    Binom,
    /// Squared binomial coefficients.
    Binom2,
    /// `C(n + k, k)`.
    BinomSym,
}

impl BuiltinTriangle {
    pub const ALL: [BuiltinTriangle; 8] = [
        BuiltinTriangle::S1,
        BuiltinTriangle::S1signed,
        BuiltinTriangle::S2,
        BuiltinTriangle::E1,
        BuiltinTriangle::E2,
        BuiltinTriangle::Binom,
        BuiltinTriangle::Binom2,
        BuiltinTriangle::BinomSym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinTriangle::S1 => "S1",
            BuiltinTriangle::S1signed => "S1signed",
            BuiltinTriangle::S2 => "S2",
            BuiltinTriangle::E1 => "E1",
            BuiltinTriangle::E2 => "E2",
            BuiltinTriangle::Binom => "Binom",
            BuiltinTriangle::Binom2 => "Binom2",
            BuiltinTriangle::BinomSym => "BinomSym",
        }
    }
}

impl fmt::Display for BuiltinTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinTriangle {
    type Err = TriangleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinTriangle::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TriangleError::UnknownTriangle(s.to_string()))
    }
}

const BINOM_PARAMS: [i64; 6] = [0, 0, 1, 0, 0, 1];

pub fn builtin_spec(id: BuiltinTriangle) -> TriangleSpec {
    let name = id.name();
    match id {
        BuiltinTriangle::S1 => TriangleSpec::new(name, [1, 0, -1, 0, 0, 1]),
        BuiltinTriangle::S1signed => TriangleSpec::new(name, [-1, 0, 1, 0, 0, 1]),
        BuiltinTriangle::S2 => TriangleSpec::new(name, [0, 1, 0, 0, 0, 1]),
        BuiltinTriangle::E1 => TriangleSpec::new(name, [0, 1, 1, 1, -1, 0]),
        BuiltinTriangle::E2 => TriangleSpec::new(name, [0, 1, 1, 2, -1, -1]),
        BuiltinTriangle::Binom => TriangleSpec::new(name, BINOM_PARAMS),
        BuiltinTriangle::Binom2 => TriangleSpec {
            derived: Some(DerivedTransform::Squared),
            ..TriangleSpec::new(name, BINOM_PARAMS)
        },
        BuiltinTriangle::BinomSym => TriangleSpec {
            derived: Some(DerivedTransform::SymmetricIndex),
            ..TriangleSpec::new(name, BINOM_PARAMS)
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntrySign {
    Positive,
    Negative,
}

/// A nonzero entry location together with the sign of the stored value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub n: i64,
    pub k: i64,
    pub sign: EntrySign,
}

/// A materialized triangle. Immutable once built.
#[derive(Debug, Clone)]
pub struct TriangleTable {
    spec: TriangleSpec,
    rows: Vec<Vec<BigInt>>,
    value_index: HashMap<BigInt, Vec<Position>>,
    zero: BigInt,
}

fn recurrence_rows(params: &[i64; 6], num_rows: usize) -> Vec<Vec<BigInt>> {
    let [a, b, c, a2, b2, c2] = *params;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(num_rows);
    rows.push(vec![BigInt::one()]);
    for n in 1..num_rows as i64 {
        let prev = &rows[n as usize - 1];
        let row = (0..=n)
            .map(|k| {
                let mut v = BigInt::zero();
                if k < n {
                    let w = a * n + b * k + c;
                    if w != 0 {
                        v += &prev[k as usize] * w;
                    }
                }
                if k >= 1 {
                    let w = a2 * n + b2 * k + c2;
                    if w != 0 {
                        v += &prev[k as usize - 1] * w;
                    }
                }
                v
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Materializes rows `0..num_rows` of the triangle described by `spec`.
///
/// Panics if `num_rows == 0`.
pub fn build_triangle(spec: &TriangleSpec, num_rows: usize) -> TriangleTable {
    assert!(num_rows >= 1, "a triangle needs at least one row");
    let mut rows = match spec.derived {
        None => recurrence_rows(&spec.params, num_rows),
        Some(DerivedTransform::Squared) => recurrence_rows(&spec.params, num_rows)
            .into_iter()
            .map(|row| row.into_iter().map(|v| &v * &v).collect())
            .collect(),
        Some(DerivedTransform::SymmetricIndex) => {
            let base = recurrence_rows(&spec.params, 2 * num_rows - 1);
            (0..num_rows)
                .map(|n| (0..=n).map(|k| base[n + k][k].clone()).collect())
                .collect()
        }
    };
    if spec.sign_mode == SignMode::Unsigned {
        for v in rows.iter_mut().flatten() {
            *v = v.abs();
        }
    }

    let mut value_index: HashMap<BigInt, Vec<Position>> = HashMap::new();
    for (n, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let sign = if v.is_negative() {
                EntrySign::Negative
            } else {
                EntrySign::Positive
            };
            value_index.entry(v.abs()).or_default().push(Position {
                n: n as i64,
                k: k as i64,
                sign,
            });
        }
    }

    TriangleTable {
        spec: spec.clone(),
        rows,
        value_index,
        zero: BigInt::zero(),
    }
}

impl TriangleTable {
    pub fn spec(&self) -> &TriangleSpec {
        &self.spec
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, n: usize) -> Option<&[BigInt]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `T(n, k)`; zero outside `0 <= k <= n`, a range error for rows that
    /// were not materialized.
    pub fn entry(&self, n: i64, k: i64) -> Result<&BigInt, TriangleError> {
        if n < 0 || n as usize >= self.rows.len() {
            return Err(TriangleError::RowOutOfRange {
                name: self.spec.name.clone(),
                n,
                num_rows: self.rows.len(),
            });
        }
        if k < 0 || k > n {
            return Ok(&self.zero);
        }
        Ok(&self.rows[n as usize][k as usize])
    }

    /// Every position holding `±|value|`, sorted by `(n, k)`.
    pub fn value_positions(&self, value: &BigInt) -> Result<&[Position], TriangleError> {
        if value.is_zero() {
            return Err(TriangleError::ZeroValue);
        }
        Ok(self
            .value_index
            .get(&value.abs())
            .map(Vec::as_slice)
            .unwrap_or(&[]))
    }

    /// Distinct absolute values present in the table, in arbitrary order.
    pub fn distinct_values(&self) -> impl Iterator<Item = (&BigInt, &[Position])> {
        self.value_index.iter().map(|(v, p)| (v, p.as_slice()))
    }

    pub fn distinct_value_count(&self) -> usize {
        self.value_index.len()
    }

    /// Detects row symmetry `T(n, k) = T(n, n + shift - k)` over rows `1..`,
    /// trying shifts `0` (binomial-like) and `-1` (Eulerian-like).
    pub fn row_reflection(&self) -> Option<i64> {
        if self.rows.len() < 3 {
            return None;
        }
        [0i64, -1].into_iter().find(|&shift| {
            self.rows.iter().enumerate().skip(1).all(|(n, row)| {
                let n = n as i64;
                (0..=n).all(|k| {
                    let mirrored = n + shift - k;
                    let other = if (0..=n).contains(&mirrored) {
                        &row[mirrored as usize]
                    } else {
                        &self.zero
                    };
                    row[k as usize] == *other
                })
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn table(id: BuiltinTriangle, rows: usize) -> TriangleTable {
        build_triangle(&builtin_spec(id), rows)
    }

    /// Unsigned S1 by counting permutations of `n` by number of cycles.
    fn permutations_by_cycles(n: usize) -> Vec<i64> {
        let mut counts = vec![0i64; n + 1];
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut seen = vec![false; n];
            let mut cycles = 0;
            for s in 0..n {
                if !seen[s] {
                    cycles += 1;
                    let mut x = s;
                    while !seen[x] {
                        seen[x] = true;
                        x = perm[x];
                    }
                }
            }
            counts[cycles] += 1;
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1))
                .rev()
                .find(|&i| perm[i] < perm[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        counts
    }

    /// Set partitions of `n` labelled elements into `k` blocks, by restricted growth strings.
    fn set_partitions(n: usize, k: usize) -> i64 {
        fn go(pos: usize, n: usize, max: usize, k: usize) -> i64 {
            if pos == n {
                return (max == k) as i64;
            }
            (0..=max.min(k - 1))
                .map(|b| go(pos + 1, n, max.max(b + 1), k))
                .sum()
        }
        if n == 0 || k == 0 {
            return (n == k) as i64;
        }
        go(0, n, 0, k)
    }

    #[test]
    fn s1_row_five_counts_permutations_by_cycles() {
        let t = table(BuiltinTriangle::S1, 12);
        assert_eq!(t.row(5).unwrap(), ints(&[0, 24, 50, 35, 10, 1]).as_slice());
        for n in 1..=6 {
            let brute = permutations_by_cycles(n);
            let row: Vec<i64> = (0..=n as i64)
                .map(|k| t.entry(n as i64, k).unwrap().try_into().unwrap())
                .collect();
            assert_eq!(row, brute, "row {n}");
        }
    }

    #[test]
    fn s2_matches_set_partitions() {
        let t = table(BuiltinTriangle::S2, 12);
        assert_eq!(*t.entry(4, 2).unwrap(), BigInt::from(7));
        for n in 0..=7 {
            for k in 0..=n {
                assert_eq!(
                    *t.entry(n as i64, k as i64).unwrap(),
                    BigInt::from(set_partitions(n, k))
                );
            }
        }
    }

    #[test]
    fn eulerian_rows() {
        let e1 = table(BuiltinTriangle::E1, 12);
        assert_eq!(&e1.row(3).unwrap()[..3], ints(&[1, 4, 1]).as_slice());
        let e2 = table(BuiltinTriangle::E2, 12);
        assert_eq!(&e2.row(1).unwrap()[..1], ints(&[1]).as_slice());
        assert_eq!(&e2.row(2).unwrap()[..2], ints(&[1, 2]).as_slice());
        assert_eq!(&e2.row(3).unwrap()[..3], ints(&[1, 8, 6]).as_slice());
    }

    #[test]
    fn builtin_parameters() {
        assert_eq!(builtin_spec(BuiltinTriangle::S2).params, [0, 1, 0, 0, 0, 1]);
        assert_eq!(
            builtin_spec(BuiltinTriangle::Binom).params,
            [0, 0, 1, 0, 0, 1]
        );
        assert_eq!(
            builtin_spec(BuiltinTriangle::E2).params,
            [0, 1, 1, 2, -1, -1]
        );
        assert_eq!(
            builtin_spec(BuiltinTriangle::Binom2).derived,
            Some(DerivedTransform::Squared)
        );
        assert_eq!(
            builtin_spec(BuiltinTriangle::BinomSym).derived,
            Some(DerivedTransform::SymmetricIndex)
        );
        assert!(matches!(
            TriangleSpec::builtin("S9"),
            Err(TriangleError::UnknownTriangle(_))
        ));
        assert_eq!(TriangleSpec::builtin("binom2").unwrap().name, "Binom2");
    }

    #[test]
    fn entry_range_behaviour() {
        let s1 = table(BuiltinTriangle::S1, 12);
        assert_eq!(*s1.entry(5, 4).unwrap(), BigInt::from(10));
        assert!(s1.entry(3, 5).unwrap().is_zero());
        assert!(s1.entry(3, -1).unwrap().is_zero());
        assert!(matches!(
            s1.entry(12, 3),
            Err(TriangleError::RowOutOfRange { n: 12, .. })
        ));
        assert!(s1.entry(-1, 0).is_err());
        for id in BuiltinTriangle::ALL {
            assert!(table(id, 1).entry(0, 0).unwrap().is_one());
        }
    }

    #[test]
    fn value_positions_lookup() {
        let s1 = table(BuiltinTriangle::S1, 12);
        let p = s1.value_positions(&BigInt::from(10)).unwrap();
        assert_eq!(
            p,
            &[Position {
                n: 5,
                k: 4,
                sign: EntrySign::Positive
            }]
        );

        let binom = table(BuiltinTriangle::Binom, 12);
        let p: Vec<(i64, i64)> = binom
            .value_positions(&BigInt::from(-6))
            .unwrap()
            .iter()
            .map(|p| (p.n, p.k))
            .collect();
        assert_eq!(p, vec![(4, 2), (6, 1), (6, 5)]);

        let e1 = table(BuiltinTriangle::E1, 12);
        let ones: Vec<(i64, i64)> = e1
            .value_positions(&BigInt::one())
            .unwrap()
            .iter()
            .map(|p| (p.n, p.k))
            .collect();
        let mut expected = vec![(0, 0)];
        for n in 1..12 {
            expected.push((n, 0));
            if n > 1 {
                expected.push((n, n - 1));
            }
        }
        assert_eq!(ones, expected);
        assert_eq!(
            s1.value_positions(&BigInt::zero()),
            Err(TriangleError::ZeroValue)
        );
        assert!(s1.value_positions(&BigInt::from(7919)).unwrap().is_empty());
    }

    #[test]
    fn signed_and_unsigned_modes() {
        let signed = table(BuiltinTriangle::S1signed, 8);
        let p = signed.value_positions(&BigInt::from(50)).unwrap();
        assert_eq!(
            p,
            &[Position {
                n: 5,
                k: 2,
                sign: EntrySign::Negative
            }]
        );
        let abs = build_triangle(
            &builtin_spec(BuiltinTriangle::S1signed).with_sign_mode(SignMode::Unsigned),
            8,
        );
        let s1 = table(BuiltinTriangle::S1, 8);
        for n in 0..8 {
            assert_eq!(abs.row(n), s1.row(n));
        }
    }

    #[test]
    fn derived_triangles() {
        let b = table(BuiltinTriangle::Binom, 23);
        let b2 = table(BuiltinTriangle::Binom2, 12);
        let bs = table(BuiltinTriangle::BinomSym, 12);
        for n in 0..12i64 {
            for k in 0..=n {
                let v = b.entry(n, k).unwrap();
                assert_eq!(*b2.entry(n, k).unwrap(), v * v);
                assert_eq!(bs.entry(n, k).unwrap(), b.entry(n + k, k).unwrap());
            }
        }
    }

    #[test]
    fn reflections_detected() {
        assert_eq!(table(BuiltinTriangle::Binom, 12).row_reflection(), Some(0));
        assert_eq!(table(BuiltinTriangle::Binom2, 12).row_reflection(), Some(0));
        assert_eq!(table(BuiltinTriangle::E1, 12).row_reflection(), Some(-1));
        assert_eq!(table(BuiltinTriangle::S1, 12).row_reflection(), None);
        assert_eq!(table(BuiltinTriangle::S2, 12).row_reflection(), None);
        assert_eq!(table(BuiltinTriangle::BinomSym, 12).row_reflection(), None);
    }
}
