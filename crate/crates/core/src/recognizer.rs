//! Closed-form recognition for remainder sequences and index functions.
//!
//! The ladder, applied after pulling out a `(-1)^m` factor from strictly
//! alternating data: constant, polynomial (finite differences with two
//! confirming zeros), geometric, then hypergeometric terms whose term ratio is
//! a rational function of degree at most two resolved into factorials,
//! geometric factors and short polynomial products.

use std::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numbers::{factorial, is_perfect_square, rat, rational_pow, sign_power, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("factorial of negative argument {0}")]
    NegativeFactorial(i64),
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("division by zero")]
    DivisionByZero,
}

/// `slope * m + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub slope: i64,
    pub offset: i64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        slope: 1,
        offset: 0,
    };

    pub fn new(slope: i64, offset: i64) -> Self {
        Affine { slope, offset }
    }

    pub fn at(&self, m: i64) -> i64 {
        self.slope * m + self.offset
    }
}

/// A closed form in one index `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    Const(#[serde(with = "crate::numbers::serde_rational")] Rational),
    /// Coefficients in `m`, lowest degree first.
    Poly(#[serde(with = "crate::numbers::serde_rational_vec")] Vec<Rational>),
    Geometric {
        #[serde(with = "crate::numbers::serde_rational")]
        base: Rational,
        exponent: Affine,
    },
    /// `(slope*m + offset)!` with `slope` in `{-1, 0, 1}`.
    Factorial(Affine),
    /// `(-1)^(slope*m + offset)`.
    SignAlt(Affine),
    Inverse(Box<ClosedForm>),
    Product(Vec<ClosedForm>),
}

impl ClosedForm {
    pub fn one() -> Self {
        ClosedForm::Const(Rational::one())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ClosedForm::Const(c) if c.is_one())
    }

    pub fn evaluate(&self, m: i64) -> Result<Rational, EvalError> {
        Ok(match self {
            ClosedForm::Const(c) => c.clone(),
            ClosedForm::Poly(cs) => poly_eval(cs, &rat(m)),
            ClosedForm::Geometric { base, exponent } => {
                rational_pow(base, exponent.at(m)).ok_or(EvalError::ZeroToNegativePower)?
            }
            ClosedForm::Factorial(a) => {
                let n = a.at(m);
                if n < 0 {
                    return Err(EvalError::NegativeFactorial(n));
                }
                Rational::from_integer(factorial(n as u64))
            }
            ClosedForm::SignAlt(a) => rat(sign_power(a.at(m))),
            ClosedForm::Inverse(inner) => {
                let v = inner.evaluate(m)?;
                if v.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                v.recip()
            }
            ClosedForm::Product(parts) => {
                let mut acc = Rational::one();
                for p in parts {
                    acc *= p.evaluate(m)?;
                }
                acc
            }
        })
    }

    pub fn node_count(&self) -> usize {
        match self {
            ClosedForm::Inverse(inner) => 1 + inner.node_count(),
            ClosedForm::Product(parts) => parts.iter().map(ClosedForm::node_count).sum(),
            _ => 1,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ClosedForm::Poly(cs) => cs.len().saturating_sub(1),
            ClosedForm::Inverse(inner) => inner.degree(),
            ClosedForm::Product(parts) => parts.iter().map(ClosedForm::degree).sum(),
            _ => 0,
        }
    }

    /// Flattens nested products, folds constants, drops unit factors.
    pub fn product(parts: Vec<ClosedForm>) -> ClosedForm {
        let mut constant = Rational::one();
        let mut rest = Vec::new();
        let mut stack: Vec<ClosedForm> = parts.into_iter().rev().collect();
        while let Some(p) = stack.pop() {
            match p {
                ClosedForm::Const(c) => constant *= c,
                ClosedForm::Product(inner) => stack.extend(inner.into_iter().rev()),
                other => rest.push(other),
            }
        }
        if constant.is_zero() {
            return ClosedForm::Const(constant);
        }
        if !constant.is_one() {
            rest.insert(0, ClosedForm::Const(constant));
        }
        match rest.len() {
            0 => ClosedForm::one(),
            1 => rest.pop().unwrap(),
            _ => ClosedForm::Product(rest),
        }
    }

    /// Checks `evaluate(start + k) == values[k]` for every `k`.
    pub fn reproduces(&self, values: &[Rational], start: i64) -> bool {
        values
            .iter()
            .enumerate()
            .all(|(k, v)| self.evaluate(start + k as i64).as_ref() == Ok(v))
    }

    fn rank_key(&self) -> (usize, usize) {
        (self.node_count(), self.degree())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizerOptions {
    /// Maximum numerator/denominator degree of the fitted term ratio.
    pub ratio_degree_cap: usize,
    /// Zero entries required in the final finite-difference row.
    pub confirming_zeros: usize,
}

impl Default for RecognizerOptions {
    fn default() -> Self {
        RecognizerOptions {
            ratio_degree_cap: 2,
            confirming_zeros: 2,
        }
    }
}

/// Closed forms reproducing `values` at `start, start+1, ...`, simplest first.
pub fn recognize_sequence(values: &[Rational], start: i64) -> Vec<ClosedForm> {
    recognize_with(values, start, &RecognizerOptions::default())
}

pub fn recognize_with(
    values: &[Rational],
    start: i64,
    opts: &RecognizerOptions,
) -> Vec<ClosedForm> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut found = Vec::new();
    if all_equal(values) {
        found.push(ClosedForm::Const(values[0].clone()));
    } else if is_alternating(values) {
        let same_parity = (sign_power(start) > 0) == values[0].is_positive();
        let sign = Affine::new(1, if same_parity { 0 } else { 1 });
        let work: Vec<Rational> = values
            .iter()
            .enumerate()
            .map(|(k, v)| v * rat(sign_power(sign.at(start + k as i64))))
            .collect();
        for form in ladder(&work, start, opts) {
            found.push(ClosedForm::product(vec![ClosedForm::SignAlt(sign), form]));
        }
    } else {
        found.extend(ladder(values, start, opts));
    }
    found.retain(|f| f.reproduces(values, start));
    found.sort_by_key(ClosedForm::rank_key);
    found.dedup();
    found
}

fn all_equal(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

fn is_alternating(values: &[Rational]) -> bool {
    values.len() >= 2
        && values.iter().all(|v| !v.is_zero())
        && values
            .windows(2)
            .all(|w| w[0].is_positive() != w[1].is_positive())
}

fn ladder(values: &[Rational], start: i64, opts: &RecognizerOptions) -> Vec<ClosedForm> {
    if all_equal(values) {
        return vec![ClosedForm::Const(values[0].clone())];
    }
    let mut out = Vec::new();
    out.extend(polynomial_fit(values, start, opts));
    out.extend(geometric_fit(values, start));
    out.extend(hypergeometric_fit(values, start, opts));
    out
}

// Dense polynomial helpers over the rationals, lowest degree first.

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// `p(m + 1)`.
fn poly_shift_one(p: &[Rational]) -> Vec<Rational> {
    let one_plus_m = vec![Rational::one(), Rational::one()];
    let mut acc: Vec<Rational> = Vec::new();
    for c in p.iter().rev() {
        acc = poly_mul(&acc, &one_plus_m);
        if acc.is_empty() {
            acc.push(c.clone());
        } else {
            acc[0] += c;
        }
    }
    trim(acc)
}

/// Quotient if `d` divides `p` exactly.
fn poly_div_exact(p: &[Rational], d: &[Rational]) -> Option<Vec<Rational>> {
    let d = trim(d.to_vec());
    let mut rem = trim(p.to_vec());
    if d.is_empty() {
        return None;
    }
    if rem.len() < d.len() {
        return rem.is_empty().then(Vec::new);
    }
    let mut q = vec![Rational::zero(); rem.len() - d.len() + 1];
    while rem.len() >= d.len() && !rem.is_empty() {
        let shift = rem.len() - d.len();
        let f = rem.last().unwrap() / d.last().unwrap();
        for (k, c) in d.iter().enumerate() {
            rem[shift + k] -= &f * c;
        }
        q[shift] = f;
        rem = trim(rem);
    }
    rem.is_empty().then(|| trim(q))
}

/// Shifts `a` with `p = lc * prod (m + a)`, when every root is an integer.
fn integer_shifts(p: &[Rational]) -> Option<Vec<i64>> {
    match p.len() {
        0 => None,
        1 => Some(Vec::new()),
        2 => {
            let a = &p[0] / &p[1];
            a.is_integer()
                .then(|| a.to_integer().to_i64())
                .flatten()
                .map(|a| vec![a])
        }
        3 => {
            // m^2 + b m + c = (m + a1)(m + a2)
            let b = &p[1] / &p[2];
            let c = &p[0] / &p[2];
            let disc = &b * &b - rat(4) * &c;
            if disc.is_negative() {
                return None;
            }
            let num = is_perfect_square(disc.numer())?;
            let den = is_perfect_square(disc.denom())?;
            let root = Rational::new(num, den);
            let a1 = (&b + &root) / rat(2);
            let a2 = (&b - &root) / rat(2);
            if a1.is_integer() && a2.is_integer() {
                Some(vec![a1.to_integer().to_i64()?, a2.to_integer().to_i64()?])
            } else {
                None
            }
        }
        _ => None,
    }
}

fn polynomial_fit(values: &[Rational], start: i64, opts: &RecognizerOptions) -> Option<ClosedForm> {
    let mut rows = vec![values.to_vec()];
    loop {
        let last = rows.last().unwrap();
        if last.iter().all(Zero::is_zero) {
            break;
        }
        if last.len() <= 1 {
            return None;
        }
        let next: Vec<Rational> = last.windows(2).map(|w| &w[1] - &w[0]).collect();
        rows.push(next);
    }
    // rows[d] is the constant row, rows[d + 1] the zero row
    if rows.len() < 3 || rows.last().unwrap().len() < opts.confirming_zeros {
        return None;
    }
    let degree = rows.len() - 2;
    // Newton forward form: sum_k D^k v(start) * C(m - start, k)
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut falling: Vec<Rational> = vec![Rational::one()];
    for (k, row) in rows.iter().take(degree + 1).enumerate() {
        let scale = &row[0] / Rational::from_integer(factorial(k as u64));
        for (e, c) in falling.iter().enumerate() {
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rational::zero());
            }
            coeffs[e] += &scale * c;
        }
        let root = rat(start + k as i64);
        falling = poly_mul(&falling, &[-root, Rational::one()]);
    }
    Some(ClosedForm::Poly(trim(coeffs)))
}

/// Lowest-degree polynomial through `points` (distinct keys), without any
/// confirmation. Only sound where values off `points` are never used.
pub fn interpolating_polynomial(points: &[(i64, Rational)]) -> ClosedForm {
    let mut coeffs: Vec<Rational> = Vec::new();
    for (a, (xa, ya)) in points.iter().enumerate() {
        let mut basis = vec![ya.clone()];
        for (b, (xb, _)) in points.iter().enumerate() {
            if a != b {
                let d = rat(xa - xb);
                basis = poly_mul(&basis, &[rat(-xb) / &d, Rational::one() / d]);
            }
        }
        if coeffs.len() < basis.len() {
            coeffs.resize(basis.len(), Rational::zero());
        }
        for (c, b) in coeffs.iter_mut().zip(basis) {
            *c += b;
        }
    }
    match trim(coeffs).as_slice() {
        [] => ClosedForm::Const(Rational::zero()),
        [c] => ClosedForm::Const(c.clone()),
        p => ClosedForm::Poly(p.to_vec()),
    }
}

fn ratios(values: &[Rational]) -> Option<Vec<Rational>> {
    if values.iter().any(Zero::is_zero) {
        return None;
    }
    Some(values.windows(2).map(|w| &w[1] / &w[0]).collect())
}

fn geometric_fit(values: &[Rational], start: i64) -> Option<ClosedForm> {
    if values.len() < 3 {
        return None;
    }
    let r = ratios(values)?;
    if !all_equal(&r) || r[0].is_one() || r[0].is_negative() {
        return None;
    }
    let base = r[0].clone();
    let scale = &values[0] / rational_pow(&base, start)?;
    Some(ClosedForm::product(vec![
        ClosedForm::Const(scale),
        ClosedForm::Geometric {
            base,
            exponent: Affine::IDENTITY,
        },
    ]))
}

/// Null space of a rational matrix (rows of equal length), as basis vectors.
fn null_space(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[row][f].clone();
            }
            v
        })
        .collect()
}

/// Fits `v(m+1) / v(m) = P(m) / Q(m)` with the smallest degrees that leave a
/// one-dimensional solution space and at least one confirming ratio.
fn fit_ratio(
    values: &[Rational],
    start: i64,
    cap: usize,
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let r = ratios(values)?;
    let mut shapes: Vec<(usize, usize)> = (0..=cap)
        .flat_map(|p| (0..=cap).map(move |q| (p, q)))
        .filter(|&(p, q)| p + q > 0)
        .collect();
    shapes.sort_by_key(|&(p, q)| (p + q, p));
    for (dp, dq) in shapes {
        let cols = dp + dq + 2;
        if r.len() < cols {
            continue;
        }
        let rows: Vec<Vec<Rational>> = r
            .iter()
            .enumerate()
            .map(|(k, ratio)| {
                let m = rat(start + k as i64);
                let mut row = Vec::with_capacity(cols);
                let mut pw = Rational::one();
                for _ in 0..=dp {
                    row.push(pw.clone());
                    pw *= &m;
                }
                let mut pw = Rational::one();
                for _ in 0..=dq {
                    row.push(-(ratio * &pw));
                    pw *= &m;
                }
                row
            })
            .collect();
        let ns = null_space(rows, cols);
        if ns.len() != 1 {
            continue;
        }
        let v = &ns[0];
        let p = trim(v[..=dp].to_vec());
        let q = trim(v[dp + 1..].to_vec());
        if p.len() != dp + 1 || q.len() != dq + 1 {
            continue;
        }
        return Some((p, q));
    }
    None
}

fn hypergeometric_fit(
    values: &[Rational],
    start: i64,
    opts: &RecognizerOptions,
) -> Option<ClosedForm> {
    let (p, q) = fit_ratio(values, start, opts.ratio_degree_cap)?;
    resolve_ratio(&p, &q, values, start)
}

/// Turns a term ratio `P(m)/Q(m)` into a product of closed-form pieces.
fn resolve_ratio(
    p: &[Rational],
    q: &[Rational],
    values: &[Rational],
    start: i64,
) -> Option<ClosedForm> {
    let last = start + values.len() as i64 - 1;
    let mut parts = Vec::new();
    let mut p = p.to_vec();
    let mut q = q.to_vec();

    let q_shifts = match integer_shifts(&q) {
        Some(s) => s,
        None => {
            // v(m) = A(m) * w(m) where Q = lc * A(m) and A(m + 1) divides P
            let lc = q.last()?.clone();
            let monic: Vec<Rational> = q.iter().map(|c| c / &lc).collect();
            p = poly_div_exact(&p, &poly_shift_one(&monic))?;
            q = vec![lc];
            parts.push(ClosedForm::Poly(monic));
            Vec::new()
        }
    };
    let mut num = integer_shifts(&p)?;
    let mut den = q_shifts;

    // (m+a-1)!/(m+b-1)! with a - b small is a short polynomial product
    let mut i = 0;
    while i < num.len() {
        let a = num[i];
        if let Some(pos) = den
            .iter()
            .position(|&b| (1..=2).contains(&(a - b)) || (1..=2).contains(&(b - a)))
        {
            let b = den.remove(pos);
            num.remove(i);
            let (lo, hi) = if a > b { (b, a) } else { (a, b) };
            let mut prod = vec![Rational::one()];
            for t in lo..hi {
                prod = poly_mul(&prod, &[rat(t), Rational::one()]);
            }
            parts.push(if a > b {
                ClosedForm::Poly(prod)
            } else {
                ClosedForm::Inverse(Box::new(ClosedForm::Poly(prod)))
            });
        } else {
            i += 1;
        }
    }

    let mut flips = 0;
    for a in num {
        if start + a - 1 >= 0 {
            parts.push(ClosedForm::Factorial(Affine::new(1, a - 1)));
        } else if last + a <= 0 {
            parts.push(ClosedForm::Inverse(Box::new(ClosedForm::Factorial(
                Affine::new(-1, -a),
            ))));
            flips += 1;
        } else {
            return None;
        }
    }
    for b in den {
        if start + b - 1 >= 0 {
            parts.push(ClosedForm::Inverse(Box::new(ClosedForm::Factorial(
                Affine::new(1, b - 1),
            ))));
        } else if last + b <= 0 {
            parts.push(ClosedForm::Factorial(Affine::new(-1, -b)));
            flips += 1;
        } else {
            return None;
        }
    }
    let lead = p.last()? / q.last()?;
    if lead.is_negative() {
        flips += 1;
    }
    let base = lead.abs();
    if !base.is_one() {
        parts.push(ClosedForm::Geometric {
            base,
            exponent: Affine::IDENTITY,
        });
    }
    if flips % 2 == 1 {
        parts.push(ClosedForm::SignAlt(Affine::IDENTITY));
    }
    let shape = ClosedForm::product(parts);
    let at_start = shape.evaluate(start).ok()?;
    if at_start.is_zero() {
        return None;
    }
    Some(ClosedForm::product(vec![
        ClosedForm::Const(&values[0] / at_start),
        shape,
    ]))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("index {j} has conflicting values {a} and {b}")]
    ConflictingPoints { j: i64, a: i64, b: i64 },
    #[error("an index function fit needs at least one point")]
    NoPoints,
}

/// Integer-coefficient polynomial in the sequence index `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexPoly {
    /// Lowest degree first, no trailing zeros.
    coeffs: Vec<i64>,
}

impl IndexPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IndexPoly { coeffs }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    /// `j + c`.
    pub fn shifted_identity(c: i64) -> Self {
        Self::new(vec![c, 1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, j: i64) -> i64 {
        self.coeffs.iter().rev().fold(0i64, |acc, c| acc * j + c)
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.coeffs.len() {
            0 => Some(0),
            1 => Some(self.coeffs[0]),
            _ => None,
        }
    }

    pub fn add(&self, other: &IndexPoly) -> IndexPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IndexPoly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0) + other.coeffs.get(k).unwrap_or(&0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &IndexPoly) -> IndexPoly {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, s: i64) -> IndexPoly {
        IndexPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

/// Minimal-degree (at most 2) integer polynomial through every point.
pub fn fit_index_function(points: &[(i64, i64)]) -> Result<Option<IndexPoly>, FitError> {
    fit_index_function_with(points, 2)
}

/// As [`fit_index_function`] with an explicit degree cap. A degree-`d` fit
/// needs one confirming point beyond the `d + 1` it is interpolated from,
/// except for one or two points in total where no confirmation exists.
pub fn fit_index_function_with(
    points: &[(i64, i64)],
    max_degree: usize,
) -> Result<Option<IndexPoly>, FitError> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        return Err(FitError::NoPoints);
    }
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(FitError::ConflictingPoints {
            j: w[0].0,
            a: w[0].1,
            b: w[1].1,
        });
    }
    let n = pts.len();
    for d in 0..=max_degree {
        if n < d + 1 {
            break;
        }
        if n < d + 2 && n > 2 {
            break;
        }
        let Some(candidate) = interpolate(&pts[..=d]) else {
            continue;
        };
        if pts.iter().all(|&(j, v)| candidate.eval(j) == v) {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Integer-coefficient interpolant through the given points, if one exists.
pub(crate) fn interpolate(pts: &[(i64, i64)]) -> Option<IndexPoly> {
    match *pts {
        [(_, y)] => Some(IndexPoly::constant(y)),
        [(x0, y0), (x1, y1)] => {
            let (dy, dx) = (y1 - y0, x1 - x0);
            if dx == 0 || dy % dx != 0 {
                return None;
            }
            let slope = dy / dx;
            Some(IndexPoly::new(vec![y0 - slope * x0, slope]))
        }
        [(x0, y0), (x1, y1), (x2, y2)] => interpolate3([x0, x1, x2], [y0, y1, y2]),
        _ => interpolate_general(pts),
    }
}

/// Three-point case in exact integer arithmetic over the common denominator
/// `(x1 - x0)(x2 - x1)(x2 - x0)`.
fn interpolate3(x: [i64; 3], y: [i64; 3]) -> Option<IndexPoly> {
    let [x0, x1, x2] = x.map(i128::from);
    let [y0, y1, y2] = y.map(i128::from);
    let (h1, h2, h) = (x1 - x0, x2 - x1, x2 - x0);
    if h1 == 0 || h2 == 0 {
        return None;
    }
    let den = h1 * h2 * h;
    // second divided difference times den
    let c2 = (y2 - y1) * h1 - (y1 - y0) * h2;
    // first divided difference f[x0, x1] times den
    let f01 = (y1 - y0) * h2 * h;
    let c1 = f01 - c2 * (x0 + x1);
    let c0 = y0 * den - f01 * x0 + c2 * x0 * x1;
    let exact = |v: i128| {
        (v % den == 0)
            .then(|| i64::try_from(v / den).ok())
            .flatten()
    };
    Some(IndexPoly::new(vec![exact(c0)?, exact(c1)?, exact(c2)?]))
}

fn interpolate_general(pts: &[(i64, i64)]) -> Option<IndexPoly> {
    type Small = num_rational::Ratio<i128>;
    // Newton divided differences
    let xs: Vec<i128> = pts.iter().map(|&(x, _)| x as i128).collect();
    let mut table: Vec<Small> = pts
        .iter()
        .map(|&(_, y)| Small::from_integer(y as i128))
        .collect();
    let n = pts.len();
    for level in 1..n {
        for k in (level..n).rev() {
            let dx = xs[k] - xs[k - level];
            if dx == 0 {
                return None;
            }
            table[k] = (table[k] - table[k - 1]) / Small::from_integer(dx);
        }
    }
    let mut coeffs = vec![Small::from_integer(0); n];
    let mut basis = vec![Small::from_integer(1)];
    for (k, c) in table.iter().enumerate() {
        for (e, b) in basis.iter().enumerate() {
            coeffs[e] += c * b;
        }
        // basis *= (m - x_k)
        let mut next = vec![Small::from_integer(0); basis.len() + 1];
        for (e, b) in basis.iter().enumerate() {
            next[e + 1] += b;
            next[e] -= b * Small::from_integer(xs[k]);
        }
        basis = next;
    }
    let ints = coeffs
        .iter()
        .map(|c| {
            c.is_integer()
                .then(|| i64::try_from(c.to_integer()).ok())
                .flatten()
        })
        .collect::<Option<Vec<i64>>>()?;
    Some(IndexPoly::new(ints))
}

/// Deterministic ordering used when ranking whole formulas.
pub(crate) fn compare_forms(a: &ClosedForm, b: &ClosedForm) -> Ordering {
    a.rank_key().cmp(&b.rank_key())
}
