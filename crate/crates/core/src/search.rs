//! Template search.
//!
//! Each candidate coefficient is
//!
//! ```text
//! c(j, i) = prod_t T_t(U_t(j) + u_t i, L_t(j) + l_t i) * RS1(i) * RS2(j + j0 - i)
//! ```
//!
//! with one of `RS1`, `RS2` identically one. For a fixed slope tuple
//! `(u_t, l_t)` the search works in four passes. First it finds the base
//! positions `(U_t(j), L_t(j))` that are consistent with a whole row. It then
//! joins rows by fitting the bases as polynomials in `j`, recognizes the
//! remainders, and finally verifies every candidate exactly against the input.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factorizer::{dividing_position_count, factor_over_triangles_with, FactorOptions};
use crate::numbers::{format_rational, int_to_rat, Rational};
use crate::polyseq::{first_non_integer, integer_rows, Normalization, Poly, PolySeq};
use crate::recognizer::{
    compare_forms, fit_index_function_with, interpolate, interpolating_polynomial, recognize_with,
    ClosedForm, EvalError, IndexPoly, RecognizerOptions,
};
use crate::triangles::{build_triangle, TriangleError, TriangleSpec, TriangleTable};

pub const DEFAULT_NUM_ROWS: usize = 12;
pub const DEFAULT_MIN_TERMS_WARN: usize = 6;

/// Pivot decompositions enumerated in full up to this count; beyond it the
/// per-slot cap applies.
const UNCAPPED_PIVOT_LIMIT: usize = 50_000;

/// Rows materialized at most when evaluating a formula outside a search.
const EVALUATION_ROW_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the polynomial sequence is empty")]
    EmptySequence,
    #[error("coefficient of x^{exponent} in p_{j} is {value}, not an integer; normalize the sequence first")]
    NonInteger {
        j: i64,
        exponent: u32,
        value: String,
    },
    #[error("every polynomial is zero; there is nothing to factor")]
    AllZero,
    #[error("at least one sequence factor is required")]
    NoFactors,
    #[error("triangular_sequence_num_rows must be at least 1")]
    NoRows,
    #[error("index_multiples must not be empty")]
    NoMultiples,
    #[error(
        "offset pair tuple {index} has {found} slots but there are {expected} sequence factors"
    )]
    OffsetPairArity {
        index: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub sequence_factors: Vec<TriangleSpec>,
    pub triangular_sequence_num_rows: usize,
    pub index_multiples: Vec<i64>,
    /// One `(u, l)` pair per factor slot, per tuple.
    pub index_offset_pairs: Option<Vec<Vec<(i64, i64)>>>,
    /// Fixed `j0`; `None` probes the three smallest admissible values.
    pub index_offset: Option<i64>,
    pub min_terms_warn: usize,
    /// Positions kept per divisor class and slot during factorization.
    pub per_slot_cap: usize,
    /// Formulas returned at most.
    pub result_cap: usize,
    /// Wall-clock budget per slope tuple.
    pub budget: Option<Duration>,
    /// Also return row reflections of symmetric factors.
    pub include_reflections: bool,
    /// Highest degree of `U(j)` and `L(j)`.
    pub index_degree_cap: usize,
    pub recognizer: RecognizerOptions,
}

impl SearchOptions {
    pub fn new(sequence_factors: Vec<TriangleSpec>) -> Self {
        SearchOptions {
            sequence_factors,
            triangular_sequence_num_rows: DEFAULT_NUM_ROWS,
            index_multiples: vec![0, 1],
            index_offset_pairs: None,
            index_offset: None,
            min_terms_warn: DEFAULT_MIN_TERMS_WARN,
            per_slot_cap: 64,
            result_cap: 32,
            budget: None,
            include_reflections: true,
            index_degree_cap: 2,
            recognizer: RecognizerOptions::default(),
        }
    }

    /// Options for built-in triangles given by id.
    pub fn with_builtins(ids: &[&str]) -> Result<Self, TriangleError> {
        let specs = ids
            .iter()
            .map(|id| TriangleSpec::builtin(id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(specs))
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.sequence_factors.is_empty() {
            return Err(SearchError::NoFactors);
        }
        if self.triangular_sequence_num_rows == 0 {
            return Err(SearchError::NoRows);
        }
        match &self.index_offset_pairs {
            Some(pairs) => {
                if let Some((index, t)) = pairs
                    .iter()
                    .enumerate()
                    .find(|(_, t)| t.len() != self.sequence_factors.len())
                {
                    return Err(SearchError::OffsetPairArity {
                        index,
                        expected: self.sequence_factors.len(),
                        found: t.len(),
                    });
                }
            }
            None if self.index_multiples.is_empty() => return Err(SearchError::NoMultiples),
            None => {}
        }
        Ok(())
    }
}

/// One factor slot: `T(U(j) + u i, L(j) + l i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorTemplate {
    pub triangle: TriangleSpec,
    pub upper: IndexPoly,
    pub upper_slope: i64,
    pub lower: IndexPoly,
    pub lower_slope: i64,
}

impl FactorTemplate {
    pub fn position(&self, j: i64, i: i64) -> (i64, i64) {
        (
            self.upper.eval(j) + self.upper_slope * i,
            self.lower.eval(j) + self.lower_slope * i,
        )
    }

    /// `T(n, k) = T(n, n + shift - k)` turned into a template rewrite.
    pub fn reflected(&self, shift: i64) -> FactorTemplate {
        FactorTemplate {
            triangle: self.triangle.clone(),
            upper: self.upper.clone(),
            upper_slope: self.upper_slope,
            lower: self.upper.add(&IndexPoly::constant(shift)).sub(&self.lower),
            lower_slope: self.upper_slope - self.lower_slope,
        }
    }

    /// Indices independent of both `j` and `i`.
    pub fn is_fixed_position(&self) -> bool {
        self.upper_slope == 0
            && self.lower_slope == 0
            && self.upper.as_constant().is_some()
            && self.lower.as_constant().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("formula has {found} factor templates but {expected} tables were supplied")]
    TableCount { expected: usize, found: usize },
    #[error("evaluation would need {0} triangle rows")]
    TooManyRows(usize),
}

/// A fully instantiated summation formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub templates: Vec<FactorTemplate>,
    /// Remainder in the summation index `i`.
    pub rs1: ClosedForm,
    /// Remainder in `j + j0 - i`.
    pub rs2: ClosedForm,
    pub j0: i64,
    #[serde(default)]
    pub normalization: Vec<Normalization>,
    pub sequence_index: String,
    pub summation_index: String,
    pub variable: String,
}

impl Formula {
    /// Triangle rows needed to evaluate `p_j` for every `j` in `js`.
    pub fn required_rows(&self, js: impl IntoIterator<Item = i64>) -> usize {
        let mut need = 1i64;
        for j in js {
            for i in 0..=(j + self.j0).max(-1) {
                for t in &self.templates {
                    need = need.max(t.position(j, i).0 + 1);
                }
            }
        }
        need as usize
    }

    /// Tables for every slot, each with `rows` rows.
    pub fn build_tables(&self, rows: usize) -> Vec<TriangleTable> {
        self.templates
            .iter()
            .map(|t| build_triangle(&t.triangle, rows.max(1)))
            .collect()
    }

    /// Coefficient of `x^i` in `p_j`. A zero factor product short-circuits
    /// the remainders.
    pub fn coefficient(
        &self,
        j: i64,
        i: i64,
        tables: &[&TriangleTable],
    ) -> Result<Rational, FormulaError> {
        if tables.len() != self.templates.len() {
            return Err(FormulaError::TableCount {
                expected: self.templates.len(),
                found: tables.len(),
            });
        }
        if i < 0 || i > j + self.j0 {
            return Ok(Rational::zero());
        }
        let mut product = BigInt::one();
        for (t, table) in self.templates.iter().zip(tables) {
            let (n, k) = t.position(j, i);
            product *= table.entry(n, k)?;
        }
        if product.is_zero() {
            return Ok(Rational::zero());
        }
        let rs = self.rs1.evaluate(i)? * self.rs2.evaluate(j + self.j0 - i)?;
        Ok(int_to_rat(&product) * rs)
    }

    pub fn evaluate_with(&self, j: i64, tables: &[&TriangleTable]) -> Result<Poly, FormulaError> {
        let mut coeffs = Vec::new();
        for i in 0..=(j + self.j0) {
            coeffs.push(self.coefficient(j, i, tables)?);
        }
        Ok(Poly::from_coeffs(self.variable.clone(), coeffs))
    }

    /// `p_j` for each `j` in `js`, building tables of the required size.
    pub fn evaluate_range(
        &self,
        js: impl IntoIterator<Item = i64> + Clone,
    ) -> Result<Vec<Poly>, FormulaError> {
        let rows = self.required_rows(js.clone());
        if rows > EVALUATION_ROW_LIMIT {
            return Err(FormulaError::TooManyRows(rows));
        }
        let tables = self.build_tables(rows);
        let refs: Vec<&TriangleTable> = tables.iter().collect();
        js.into_iter()
            .map(|j| self.evaluate_with(j, &refs))
            .collect()
    }

    pub fn evaluate(&self, j: i64) -> Result<Poly, FormulaError> {
        Ok(self.evaluate_range([j])?.remove(0))
    }

    fn complexity(&self) -> (usize, usize, usize, i64) {
        let index_degree = self
            .templates
            .iter()
            .map(|t| t.upper.degree() + t.lower.degree())
            .sum();
        let index_size = self
            .templates
            .iter()
            .flat_map(|t| t.upper.coeffs().iter().chain(t.lower.coeffs()))
            .map(|c| c.abs())
            .sum();
        (
            self.rs1.node_count() + self.rs2.node_count(),
            self.rs1.degree() + self.rs2.degree(),
            index_degree,
            index_size,
        )
    }
}

/// Exact check of `f` against every polynomial of `seq`. Evaluation errors
/// count as a mismatch.
pub fn verify_formula(f: &Formula, seq: &PolySeq) -> bool {
    let js: Vec<i64> = seq.indexed().map(|(j, _)| j).collect();
    match f.evaluate_range(js) {
        Ok(polys) => polys
            .iter()
            .zip(seq.polys())
            .all(|(a, b)| same_coefficients(a, b)),
        Err(_) => false,
    }
}

fn same_coefficients(a: &Poly, b: &Poly) -> bool {
    a.dense() == b.dense()
}

/// Slope tuples in search order: the explicit list verbatim, otherwise the
/// per-slot cross product of `index_multiples`, slot 0 varying slowest.
pub fn enumerate_templates(opts: &SearchOptions) -> Vec<Vec<(i64, i64)>> {
    if let Some(pairs) = &opts.index_offset_pairs {
        return pairs.clone();
    }
    let pairs: Vec<(i64, i64)> = opts
        .index_multiples
        .iter()
        .flat_map(|&u| opts.index_multiples.iter().map(move |&l| (u, l)))
        .collect();
    let mut tuples: Vec<Vec<(i64, i64)>> = vec![Vec::new()];
    for _ in 0..opts.sequence_factors.len() {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                pairs.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(*p);
                    t
                })
            })
            .collect();
    }
    tuples
}

#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub formulas: Vec<Formula>,
    pub warnings: Vec<String>,
    /// Some slope tuple ran out of time before finishing.
    pub budget_exceeded: bool,
    /// Integer remainder runs that no closed form matched.
    pub unrecognized_remainders: Vec<Vec<BigInt>>,
}

/// Searches every slope tuple and returns the verified formulas.
pub fn guess_polynomial_sequence(
    seq: &PolySeq,
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let data = SearchData::new(seq, opts)?;
    let tables: Vec<TriangleTable> = opts
        .sequence_factors
        .iter()
        .map(|s| build_triangle(s, opts.triangular_sequence_num_rows))
        .collect();
    let slopes = enumerate_templates(opts);

    let run = |s: &Vec<(i64, i64)>| run_template(&data, s, &tables, opts);
    #[cfg(feature = "parallel")]
    let per_template: Vec<TemplateOutcome> = {
        use rayon::prelude::*;
        slopes.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_template: Vec<TemplateOutcome> = slopes.iter().map(run).collect();

    let mut outcome = SearchOutcome::default();
    for t in per_template {
        outcome.budget_exceeded |= t.budget_exceeded;
        for f in t.formulas {
            if outcome.formulas.len() < opts.result_cap && !outcome.formulas.contains(&f) {
                outcome.formulas.push(f);
            }
        }
        for r in t.unrecognized {
            if !outcome.unrecognized_remainders.contains(&r) {
                outcome.unrecognized_remainders.push(r);
            }
        }
    }
    if outcome.formulas.is_empty() && seq.len() < opts.min_terms_warn {
        outcome.warnings.push(format!(
            "only {} polynomials were given and no formula was found; supply at least {} initial terms",
            seq.len(),
            opts.min_terms_warn
        ));
    }
    if outcome.budget_exceeded {
        outcome
            .warnings
            .push("the time budget ran out before every slope tuple was searched".to_string());
    }
    Ok(outcome)
}

/// Formulas for a single slope tuple against prebuilt tables, one per factor.
pub fn search_with_template(
    seq: &PolySeq,
    slopes: &[(i64, i64)],
    tables: &[TriangleTable],
    opts: &SearchOptions,
) -> Result<Vec<Formula>, SearchError> {
    let data = SearchData::new(seq, opts)?;
    if slopes.len() != tables.len() {
        return Err(SearchError::OffsetPairArity {
            index: 0,
            expected: tables.len(),
            found: slopes.len(),
        });
    }
    Ok(run_template(&data, slopes, tables, opts).formulas)
}

struct SearchData {
    rows: Vec<(i64, Vec<BigInt>)>,
    normalization: Vec<Normalization>,
    variable: String,
    /// `max_j (deg p_j - j)`, the least `j0` that covers every coefficient.
    min_j0: i64,
}

impl SearchData {
    fn new(seq: &PolySeq, opts: &SearchOptions) -> Result<Self, SearchError> {
        opts.validate()?;
        if seq.is_empty() {
            return Err(SearchError::EmptySequence);
        }
        if let Some((j, exponent, value)) = first_non_integer(seq) {
            return Err(SearchError::NonInteger {
                j,
                exponent,
                value: format_rational(&value),
            });
        }
        let rows = integer_rows(seq);
        if rows.iter().all(|(_, c)| c.is_empty()) {
            return Err(SearchError::AllZero);
        }
        let min_j0 = rows
            .iter()
            .filter(|(_, c)| !c.is_empty())
            .map(|(j, c)| c.len() as i64 - 1 - j)
            .max()
            .unwrap_or(0)
            .max(0);
        Ok(SearchData {
            rows,
            normalization: seq.normalization().to_vec(),
            variable: seq.var().to_string(),
            min_j0,
        })
    }

    fn nonzero_rows(&self) -> impl Iterator<Item = &(i64, Vec<BigInt>)> {
        self.rows.iter().filter(|(_, c)| !c.is_empty())
    }
}

struct Deadline(Option<Instant>);

impl Deadline {
    fn start(budget: Option<Duration>) -> Self {
        // Instant is only touched with a budget; it is unavailable on wasm32.
        Deadline(budget.map(|b| Instant::now() + b))
    }

    fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

struct OutOfTime;

#[derive(Default)]
struct TemplateOutcome {
    formulas: Vec<Formula>,
    budget_exceeded: bool,
    unrecognized: Vec<Vec<BigInt>>,
}

/// Base positions `(U_t(j), L_t(j))`, one per slot.
type Base = Vec<(i64, i64)>;

fn run_template(
    data: &SearchData,
    slopes: &[(i64, i64)],
    tables: &[TriangleTable],
    opts: &SearchOptions,
) -> TemplateOutcome {
    let deadline = Deadline::start(opts.budget);
    let refs: Vec<&TriangleTable> = tables.iter().collect();
    let j0s: Vec<i64> = match opts.index_offset {
        Some(j0) => vec![j0],
        None => (data.min_j0..=data.min_j0 + 2).collect(),
    };
    let mut out = TemplateOutcome::default();
    for j0 in j0s {
        let mut attempt = Attempt {
            data,
            slopes,
            tables: &refs,
            opts,
            j0,
            deadline: &deadline,
            unrecognized: Vec::new(),
            recognized: HashMap::new(),
        };
        let result = attempt.run();
        for r in attempt.unrecognized {
            if !out.unrecognized.contains(&r) {
                out.unrecognized.push(r);
            }
        }
        match result {
            Ok(formulas) if !formulas.is_empty() => {
                out.formulas = formulas;
                break;
            }
            Ok(_) => {}
            Err(OutOfTime) => {
                out.budget_exceeded = true;
                break;
            }
        }
    }
    out
}

struct Attempt<'a> {
    data: &'a SearchData,
    slopes: &'a [(i64, i64)],
    tables: &'a [&'a TriangleTable],
    opts: &'a SearchOptions,
    j0: i64,
    deadline: &'a Deadline,
    unrecognized: Vec<Vec<BigInt>>,
    recognized: HashMap<BTreeMap<i64, BigInt>, Option<ClosedForm>>,
}

fn coeff(row: &[BigInt], i: i64) -> &BigInt {
    static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
    usize::try_from(i)
        .ok()
        .and_then(|i| row.get(i))
        .unwrap_or_else(|| ZERO.get_or_init(BigInt::zero))
}

impl Attempt<'_> {
    fn check_time(&self) -> Result<(), OutOfTime> {
        if self.deadline.expired() {
            Err(OutOfTime)
        } else {
            Ok(())
        }
    }

    fn run(&mut self) -> Result<Vec<Formula>, OutOfTime> {
        let mut candidates: Vec<(i64, Vec<Base>)> = Vec::new();
        for (j, row) in self.data.nonzero_rows() {
            let top = j + self.j0;
            if top < 0 || row.len() as i64 - 1 > top {
                return Ok(Vec::new());
            }
            let bases = self.row_candidates(*j, row)?;
            if bases.is_empty() {
                return Ok(Vec::new());
            }
            candidates.push((*j, bases));
        }
        let assignments = self.join(&candidates)?;
        let mut formulas: Vec<Formula> = Vec::new();
        for templates in assignments {
            self.check_time()?;
            for f in self.formulas_for(templates) {
                if !formulas.contains(&f) {
                    formulas.push(f);
                }
            }
        }
        formulas.sort_by(|a, b| {
            a.complexity()
                .cmp(&b.complexity())
                .then_with(|| compare_forms(&a.rs1, &b.rs1))
                .then_with(|| compare_forms(&a.rs2, &b.rs2))
        });
        if !self.opts.include_reflections {
            return Ok(formulas);
        }
        let mut with_reflections = Vec::new();
        for f in formulas {
            let reflections = self.reflections(&f);
            if !with_reflections.contains(&f) {
                with_reflections.push(f);
            }
            for r in reflections {
                if !with_reflections.contains(&r) {
                    with_reflections.push(r);
                }
            }
        }
        Ok(with_reflections)
    }

    /// Bases for which every coefficient of the row is a multiple of the
    /// factor product, seeded from the cheapest coefficient's factorizations.
    fn row_candidates(&self, j: i64, row: &[BigInt]) -> Result<Vec<Base>, OutOfTime> {
        let (cost, pivot) = row
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let cost: usize = self
                    .tables
                    .iter()
                    .map(|t| dividing_position_count(t, c, usize::MAX))
                    .fold(1usize, |a, b| a.saturating_mul(b));
                (cost, i as i64)
            })
            .min()
            .expect("row has a nonzero coefficient");
        let cap = if cost <= UNCAPPED_PIVOT_LIMIT {
            usize::MAX
        } else {
            self.opts.per_slot_cap
        };
        let decompositions = factor_over_triangles_with(
            coeff(row, pivot),
            self.tables,
            &FactorOptions { per_slot_cap: cap },
        )
        .expect("pivot is nonzero and tables are present");
        let mut seen = HashSet::new();
        let mut bases = Vec::new();
        for (count, d) in decompositions.iter().enumerate() {
            if count % 256 == 0 {
                self.check_time()?;
            }
            let base: Base = d
                .factors
                .iter()
                .zip(self.slopes)
                .map(|(f, &(u, l))| (f.n - u * pivot, f.k - l * pivot))
                .collect();
            if seen.insert(base.clone()) && self.row_consistent(j, row, &base) {
                bases.push(base);
            }
        }
        Ok(bases)
    }

    fn product_at(&self, base: &Base, i: i64) -> Option<BigInt> {
        let mut product = BigInt::one();
        for ((t, &(n0, k0)), &(u, l)) in self.tables.iter().zip(base).zip(self.slopes) {
            product *= t.entry(n0 + u * i, k0 + l * i).ok()?;
        }
        Some(product)
    }

    fn row_consistent(&self, j: i64, row: &[BigInt], base: &Base) -> bool {
        (0..=j + self.j0).all(|i| {
            let Some(p) = self.product_at(base, i) else {
                return false;
            };
            let c = coeff(row, i);
            c.is_zero() || (!p.is_zero() && c.is_multiple_of(&p))
        })
    }

    /// Joins per-row bases into index polynomials. The rows with the fewest
    /// candidates seed an interpolation; the other rows must contain the
    /// predicted base.
    fn join(&self, candidates: &[(i64, Vec<Base>)]) -> Result<Vec<Vec<FactorTemplate>>, OutOfTime> {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by_key(|&r| (candidates[r].1.len(), r));
        let seed_count = order.len().min(3);
        let seeds = &order[..seed_count];
        let others = &order[seed_count..];
        let other_sets: Vec<HashSet<&Base>> = others
            .iter()
            .map(|&r| candidates[r].1.iter().collect())
            .collect();
        let coords = 2 * self.slopes.len();

        let mut found: Vec<Vec<FactorTemplate>> = Vec::new();
        let mut odometer = vec![0usize; seed_count];
        let mut steps = 0usize;
        'combos: loop {
            steps += 1;
            if steps % 1024 == 0 {
                self.check_time()?;
            }
            let chosen: Vec<&Base> = seeds
                .iter()
                .zip(&odometer)
                .map(|(&r, &c)| &candidates[r].1[c])
                .collect();
            if let Some(polys) = self.fit_seed(seeds, &chosen, candidates, coords) {
                let consistent = others.iter().zip(&other_sets).all(|(&r, set)| {
                    let j = candidates[r].0;
                    let predicted: Base = (0..self.slopes.len())
                        .map(|t| (polys[2 * t].eval(j), polys[2 * t + 1].eval(j)))
                        .collect();
                    set.contains(&predicted)
                });
                if consistent {
                    if let Some(templates) = self.confirm(candidates, &polys) {
                        if !found.contains(&templates) {
                            found.push(templates);
                        }
                    }
                }
            }
            // advance
            for (slot, &r) in seeds.iter().enumerate() {
                odometer[slot] += 1;
                if odometer[slot] < candidates[r].1.len() {
                    continue 'combos;
                }
                odometer[slot] = 0;
            }
            break;
        }
        Ok(found)
    }

    fn fit_seed(
        &self,
        seeds: &[usize],
        chosen: &[&Base],
        candidates: &[(i64, Vec<Base>)],
        coords: usize,
    ) -> Option<Vec<IndexPoly>> {
        (0..coords)
            .map(|q| {
                let pts: Vec<(i64, i64)> = seeds
                    .iter()
                    .zip(chosen)
                    .map(|(&r, b)| {
                        let (n, k) = b[q / 2];
                        (candidates[r].0, if q % 2 == 0 { n } else { k })
                    })
                    .collect();
                interpolate(&sorted(pts))
            })
            .collect()
    }

    /// Re-fits every coordinate over all rows with the confirmation rule.
    fn confirm(
        &self,
        candidates: &[(i64, Vec<Base>)],
        polys: &[IndexPoly],
    ) -> Option<Vec<FactorTemplate>> {
        let mut refit = Vec::with_capacity(polys.len());
        for p in polys {
            let pts: Vec<(i64, i64)> = candidates.iter().map(|(j, _)| (*j, p.eval(*j))).collect();
            refit.push(
                fit_index_function_with(&pts, self.opts.index_degree_cap)
                    .ok()
                    .flatten()?,
            );
        }
        Some(
            self.slopes
                .iter()
                .enumerate()
                .map(|(t, &(u, l))| FactorTemplate {
                    triangle: self.tables[t].spec().clone(),
                    upper: refit[2 * t].clone(),
                    upper_slope: u,
                    lower: refit[2 * t + 1].clone(),
                    lower_slope: l,
                })
                .collect(),
        )
    }

    /// Remainder maps keyed by `i` (side A) and by `j + j0 - i` (side B),
    /// each with whether its key set is the same on the last two rows.
    fn remainders(
        &self,
        templates: &[FactorTemplate],
    ) -> Option<[Option<(BTreeMap<i64, BigInt>, bool)>; 2]> {
        let mut sides = [Some(BTreeMap::new()), Some(BTreeMap::new())];
        let mut row_keys: Vec<[Vec<i64>; 2]> = Vec::new();
        for (j, row) in self.data.nonzero_rows() {
            let mut keys = [Vec::new(), Vec::new()];
            for i in 0..=j + self.j0 {
                let mut product = BigInt::one();
                for (t, table) in templates.iter().zip(self.tables) {
                    let (n, k) = t.position(*j, i);
                    product *= table.entry(n, k).ok()?;
                }
                let c = coeff(row, i);
                if product.is_zero() {
                    if !c.is_zero() {
                        return None;
                    }
                    continue;
                }
                let (r, rest) = c.div_rem(&product);
                if !rest.is_zero() {
                    return None;
                }
                for ((side, key), seen) in sides
                    .iter_mut()
                    .zip([i, j + self.j0 - i])
                    .zip(keys.iter_mut())
                {
                    seen.push(key);
                    if let Some(map) = side {
                        match map.get(&key) {
                            Some(prev) if *prev != r => *side = None,
                            Some(_) => {}
                            None => {
                                map.insert(key, r.clone());
                            }
                        }
                    }
                }
            }
            keys[1].sort_unstable();
            row_keys.push(keys);
        }
        let stationary = |side: usize| match row_keys.as_slice() {
            [.., a, b] => a[side] == b[side],
            _ => false,
        };
        let [a, b] = sides;
        Some([a.map(|m| (m, stationary(0))), b.map(|m| (m, stationary(1)))])
    }

    fn recognize(&mut self, map: &BTreeMap<i64, BigInt>) -> Option<ClosedForm> {
        if let Some(known) = self.recognized.get(map) {
            return known.clone();
        }
        let form = self.recognize_uncached(map);
        self.recognized.insert(map.clone(), form.clone());
        form
    }

    fn recognize_uncached(&mut self, map: &BTreeMap<i64, BigInt>) -> Option<ClosedForm> {
        if map.is_empty() {
            return Some(ClosedForm::one());
        }
        let run = longest_run(map);
        let start = run[0].0;
        let values: Vec<Rational> = run.iter().map(|(_, v)| int_to_rat(v)).collect();
        let forms = recognize_with(&values, start, &self.opts.recognizer);
        let matched = forms.into_iter().find(|f| {
            map.iter()
                .all(|(k, v)| f.evaluate(*k).is_ok_and(|x| x == int_to_rat(v)))
        });
        if matched.is_none() {
            let ints: Vec<BigInt> = run.into_iter().map(|(_, v)| v).collect();
            if !self.unrecognized.contains(&ints) {
                self.unrecognized.push(ints);
            }
        }
        matched
    }

    fn formulas_for(&mut self, templates: Vec<FactorTemplate>) -> Vec<Formula> {
        let Some(sides) = self.remainders(&templates) else {
            return Vec::new();
        };
        let mut out: Vec<Formula> = Vec::new();
        for (side, entry) in sides.iter().enumerate() {
            let Some((map, stationary)) = entry else {
                continue;
            };
            // A support that stops growing is sampled completely; any
            // interpolant is exact there and the factor vanishes elsewhere.
            let form = match self.recognize(map) {
                Some(f) => f,
                None if *stationary => interpolating_polynomial(
                    &map.iter()
                        .map(|(k, v)| (*k, int_to_rat(v)))
                        .collect::<Vec<_>>(),
                ),
                None => continue,
            };
            let (rs1, rs2) = if side == 0 || matches!(form, ClosedForm::Const(_)) {
                (form, ClosedForm::one())
            } else {
                (ClosedForm::one(), form)
            };
            let f = self.canonical(Formula {
                templates: templates.clone(),
                rs1,
                rs2,
                j0: self.j0,
                normalization: self.data.normalization.clone(),
                sequence_index: "j".to_string(),
                summation_index: "i".to_string(),
                variable: self.data.variable.clone(),
            });
            if !out.contains(&f) && self.verify(&f) {
                out.push(f);
            }
        }
        out
    }

    /// Moves slots whose entry is one at every input position onto the fixed
    /// position `(0, 0)`, so equivalent formulas compare equal and unit
    /// diagonals tied to the input range are not reported.
    fn canonical(&self, mut f: Formula) -> Formula {
        for (t, table) in f.templates.iter_mut().zip(self.tables) {
            let unit = self.data.rows.iter().all(|(j, _)| {
                (0..=j + self.j0).all(|i| {
                    let (n, k) = t.position(*j, i);
                    table.entry(n, k).is_ok_and(|v| v.is_one())
                })
            });
            if unit {
                *t = FactorTemplate {
                    triangle: t.triangle.clone(),
                    upper: IndexPoly::constant(0),
                    upper_slope: 0,
                    lower: IndexPoly::constant(0),
                    lower_slope: 0,
                };
            }
        }
        f
    }

    fn verify(&self, f: &Formula) -> bool {
        self.data.rows.iter().all(|(j, row)| {
            (0..=(j + self.j0).max(row.len() as i64 - 1)).all(|i| {
                f.coefficient(*j, i, self.tables)
                    .is_ok_and(|c| c == int_to_rat(coeff(row, i)))
            })
        })
    }

    /// Verified row reflections over every non-empty set of symmetric slots.
    fn reflections(&self, f: &Formula) -> Vec<Formula> {
        let symmetric: Vec<(usize, i64)> = self
            .tables
            .iter()
            .enumerate()
            .filter_map(|(t, table)| table.row_reflection().map(|s| (t, s)))
            .filter(|&(t, _)| !f.templates[t].is_fixed_position())
            .collect();
        let mut out = Vec::new();
        for mask in 1u32..(1 << symmetric.len()) {
            let mut g = f.clone();
            for (bit, &(t, shift)) in symmetric.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    g.templates[t] = g.templates[t].reflected(shift);
                }
            }
            if g != *f && self.verify(&g) && !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }
}

fn sorted(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts
}

/// Longest run of consecutive keys, earliest on ties.
fn longest_run(map: &BTreeMap<i64, BigInt>) -> Vec<(i64, BigInt)> {
    let mut best: Vec<(i64, BigInt)> = Vec::new();
    let mut current: Vec<(i64, BigInt)> = Vec::new();
    for (k, v) in map {
        if current.last().is_some_and(|(prev, _)| *prev + 1 != *k) {
            if current.len() > best.len() {
                best = std::mem::take(&mut current);
            } else {
                current.clear();
            }
        }
        current.push((*k, v.clone()));
    }
    if current.len() > best.len() {
        best = current;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognizer::Affine;

    fn falling(j: i64) -> Poly {
        let mut p = Poly::constant("n", Rational::one());
        for t in 0..j {
            p = &p * &Poly::from_integers("n", &[-t, 1]);
        }
        p
    }

    fn falling_seq(range: std::ops::RangeInclusive<i64>) -> PolySeq {
        PolySeq::from_fn("n", range, falling)
    }

    #[test]
    fn default_templates() {
        let opts = SearchOptions::with_builtins(&["S1"]).unwrap();
        assert_eq!(
            enumerate_templates(&opts),
            vec![vec![(0, 0)], vec![(0, 1)], vec![(1, 0)], vec![(1, 1)]]
        );
        let mut opts = opts;
        opts.index_multiples = vec![0, 3, -3];
        let t = enumerate_templates(&opts);
        assert_eq!(t.len(), 9);
        assert_eq!(t[1], vec![(0, 3)]);
        assert_eq!(t[2], vec![(0, -3)]);
        opts.index_offset_pairs = Some(vec![vec![(1, 0)], vec![(0, -1)]]);
        assert_eq!(
            enumerate_templates(&opts),
            vec![vec![(1, 0)], vec![(0, -1)]]
        );
    }

    #[test]
    fn falling_factorial_by_template() {
        let seq = falling_seq(1..=6);
        let opts = SearchOptions::with_builtins(&["S1"]).unwrap();
        let tables = vec![build_triangle(&opts.sequence_factors[0], 12)];
        let found = search_with_template(&seq, &[(0, 1)], &tables, &opts).unwrap();
        assert_eq!(found.len(), 1);
        let f = &found[0];
        assert_eq!(f.templates[0].upper, IndexPoly::new(vec![0, 1]));
        assert_eq!(f.templates[0].lower, IndexPoly::new(vec![]));
        assert_eq!(f.rs2, ClosedForm::SignAlt(Affine::IDENTITY));
        assert!(search_with_template(&seq, &[(1, 1)], &tables, &opts)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn verify_rejects_wrong_inputs() {
        let seq = falling_seq(1..=6);
        let opts = SearchOptions::with_builtins(&["S1"]).unwrap();
        let out = guess_polynomial_sequence(&seq, &opts).unwrap();
        let f = out.formulas[0].clone();
        assert!(verify_formula(&f, &seq));
        let rising = PolySeq::from_fn("n", 1..=6, |j| {
            let mut p = Poly::constant("n", Rational::one());
            for t in 1..=j {
                p = &p * &Poly::from_integers("n", &[t, 1]);
            }
            p
        });
        assert!(!verify_formula(&f, &rising));
        let mut g = f.clone();
        g.rs2 = ClosedForm::product(vec![
            g.rs2.clone(),
            ClosedForm::Const(crate::numbers::rat(2)),
        ]);
        assert!(!verify_formula(&g, &seq));
    }

    #[test]
    fn rejects_bad_input() {
        let opts = SearchOptions::with_builtins(&["S1"]).unwrap();
        let zero = PolySeq::from_fn("n", 1..=6, |_| Poly::zero("n"));
        assert_eq!(
            guess_polynomial_sequence(&zero, &opts).unwrap_err(),
            SearchError::AllZero
        );
        let half = PolySeq::parse(&["1/2*n"], "n", 1).unwrap();
        assert!(matches!(
            guess_polynomial_sequence(&half, &opts),
            Err(SearchError::NonInteger { .. })
        ));
        let mut none = opts.clone();
        none.sequence_factors.clear();
        assert_eq!(
            guess_polynomial_sequence(&falling_seq(1..=3), &none).unwrap_err(),
            SearchError::NoFactors
        );
    }

    #[test]
    fn longest_run_prefers_earliest() {
        let map: BTreeMap<i64, BigInt> = [(0, 1), (1, 2), (3, 4), (4, 5), (7, 1)]
            .into_iter()
            .map(|(k, v)| (k, BigInt::from(v)))
            .collect();
        assert_eq!(
            longest_run(&map)
                .iter()
                .map(|(k, _)| *k)
                .collect::<Vec<_>>(),
            vec![0, 1]
        );
    }
}
