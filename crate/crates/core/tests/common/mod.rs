#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::One;
use seqguess::{Poly, PolySeq, Rational};

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::one(), |acc, t| acc * (n - t) / (t + 1))
}

pub fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, t| acc * t)
}

pub fn poly(var: &str, coeffs: &[BigInt]) -> Poly {
    Poly::from_coeffs(
        var,
        coeffs.iter().map(|c| Rational::from_integer(c.clone())),
    )
}

/// `prod_{t in shifts} (x + t)`, expanded by repeated multiplication.
pub fn product_of_linears(var: &str, shifts: impl IntoIterator<Item = i64>) -> Poly {
    shifts
        .into_iter()
        .fold(Poly::constant(var, Rational::one()), |acc, t| {
            &acc * &Poly::from_integers(var, &[t, 1])
        })
}

pub fn falling(j: i64) -> Poly {
    product_of_linears("n", (0..j).map(|t| -t))
}

pub fn rising(j: i64) -> Poly {
    product_of_linears("n", 1..=j)
}

/// Eulerian numbers by counting ascents over all permutations of `n`.
pub fn eulerian_by_ascents(n: usize) -> Vec<BigInt> {
    let mut counts = vec![BigInt::from(0); n.max(1)];
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ascents = perm.windows(2).filter(|w| w[0] < w[1]).count();
        counts[ascents] += 1;
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

/// Stirling numbers of the second kind by counting restricted growth strings.
pub fn set_partition_counts(n: usize) -> Vec<BigInt> {
    fn go(pos: usize, n: usize, max: usize, counts: &mut [BigInt]) {
        if pos == n {
            counts[max] += 1;
            return;
        }
        for b in 0..=max {
            go(pos + 1, n, max.max(b + 1), counts);
        }
    }
    let mut counts = vec![BigInt::from(0); n + 1];
    go(0, n, 0, &mut counts);
    counts
}

pub fn seq_from(
    var: &str,
    range: std::ops::RangeInclusive<i64>,
    f: impl Fn(i64) -> Vec<BigInt>,
) -> PolySeq {
    PolySeq::from_fn(var, range, |j| poly(var, &f(j)))
}
