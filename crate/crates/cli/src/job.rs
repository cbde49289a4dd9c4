//! Job documents: the declarative equivalent of a guessing call.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use seqguess::numbers::parse_rational;
use seqguess::polyseq::{
    apply_user_guess, clear_denominators_lcm, normalize_exponential, parse_poly, ExponentialMode,
    GuessExpr, ParseError, PolySeqError,
};
use seqguess::search::SearchOptions;
use seqguess::triangles::{SignMode, TriangleError, TriangleSpec};
use seqguess::{Poly, PolySeq};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid job document: {0}")]
    Document(#[from] serde_json::Error),
    #[error("unsupported format_version {0:?} (expected \"1\")")]
    Version(String),
    #[error("polynomial {index}: {source}")]
    Polynomial { index: usize, source: ParseError },
    #[error("polynomial {index}, coefficient {position}: {text:?} is not a rational number")]
    Coefficient {
        index: usize,
        position: usize,
        text: String,
    },
    #[error("the job lists no polynomials")]
    NoPolynomials,
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error("user guess function: {0}")]
    UserGuess(ParseError),
    #[error(transparent)]
    Transform(#[from] PolySeqError),
    #[error("{flag}: {message}")]
    Flag { flag: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorEntry {
    Id(String),
    Params([i64; 6]),
    Custom {
        name: String,
        params: [i64; 6],
        #[serde(default = "as_is")]
        sign_mode: SignMode,
    },
}

fn as_is() -> SignMode {
    SignMode::AsIs
}

impl FactorEntry {
    pub fn to_spec(&self, slot: usize) -> Result<TriangleSpec, TriangleError> {
        match self {
            FactorEntry::Id(id) => TriangleSpec::builtin(id),
            FactorEntry::Params(p) => Ok(TriangleSpec::new(format!("T{}", slot + 1), *p)),
            FactorEntry::Custom {
                name,
                params,
                sign_mode,
            } => Ok(TriangleSpec::new(name.clone(), *params).with_sign_mode(*sign_mode)),
        }
    }
}

/// A polynomial as text in the job variable or as coefficients, lowest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyEntry {
    Text(String),
    Coefficients(Vec<Coefficient>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeMode {
    ClearLcm,
    ByJFactorial,
    ByIFactorial,
    ByBoth,
}

impl std::str::FromStr for NormalizeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "clear_lcm" => Ok(NormalizeMode::ClearLcm),
            "by_j_factorial" => Ok(NormalizeMode::ByJFactorial),
            "by_i_factorial" => Ok(NormalizeMode::ByIFactorial),
            "by_both" => Ok(NormalizeMode::ByBoth),
            _ => Err(format!(
                "unknown normalization {s:?} (expected clear_lcm, by_j_factorial, by_i_factorial or by_both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangular_sequence_num_rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_multiples: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_offset_pairs: Option<Vec<Vec<(i64, i64)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_offset: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_terms_warn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_slot_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_reflections: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default = "version")]
    pub format_version: String,
    pub variable: String,
    pub polynomials: Vec<PolyEntry>,
    #[serde(default = "one")]
    pub start_index: i64,
    #[serde(default)]
    pub sequence_factors: Vec<FactorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_guess_function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizeMode>,
    #[serde(default)]
    pub options: JobOptions,
}

fn version() -> String {
    FORMAT_VERSION.to_string()
}

fn one() -> i64 {
    1
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, JobError> {
        let job: JobSpec = serde_json::from_str(text)?;
        if job.format_version != FORMAT_VERSION {
            return Err(JobError::Version(job.format_version));
        }
        Ok(job)
    }

    pub fn load(path: &str) -> Result<Self, JobError> {
        let text = std::fs::read_to_string(path).map_err(|source| JobError::Io {
            path: path.to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The raw sequence as written in the job.
    pub fn raw_sequence(&self) -> Result<PolySeq, JobError> {
        if self.polynomials.is_empty() {
            return Err(JobError::NoPolynomials);
        }
        let polys = self
            .polynomials
            .iter()
            .enumerate()
            .map(|(index, entry)| match entry {
                PolyEntry::Text(t) => parse_poly(t, &self.variable)
                    .map_err(|source| JobError::Polynomial { index, source }),
                PolyEntry::Coefficients(cs) => {
                    let coeffs = cs
                        .iter()
                        .enumerate()
                        .map(|(position, c)| match c {
                            Coefficient::Int(n) => Ok(seqguess::numbers::rat(*n)),
                            Coefficient::Text(t) => {
                                parse_rational(t).ok_or_else(|| JobError::Coefficient {
                                    index,
                                    position,
                                    text: t.clone(),
                                })
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Poly::from_coeffs(self.variable.clone(), coeffs))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolySeq::new(polys, self.start_index)?)
    }

    /// The sequence after the user guess function and then the normalization.
    pub fn sequence(&self) -> Result<PolySeq, JobError> {
        let mut seq = self.raw_sequence()?;
        if let Some(text) = &self.user_guess_function {
            let u = GuessExpr::parse(text).map_err(JobError::UserGuess)?;
            seq = apply_user_guess(&seq, &u)?;
        }
        seq = match self.normalization {
            None => seq,
            Some(NormalizeMode::ClearLcm) => clear_denominators_lcm(&seq).0,
            Some(NormalizeMode::ByJFactorial) => {
                normalize_exponential(&seq, ExponentialMode::ByJFactorial)?
            }
            Some(NormalizeMode::ByIFactorial) => {
                normalize_exponential(&seq, ExponentialMode::ByIFactorial)?
            }
            Some(NormalizeMode::ByBoth) => normalize_exponential(&seq, ExponentialMode::ByBoth)?,
        };
        Ok(seq)
    }

    pub fn search_options(&self) -> Result<SearchOptions, JobError> {
        let specs = self
            .sequence_factors
            .iter()
            .enumerate()
            .map(|(slot, f)| f.to_spec(slot))
            .collect::<Result<Vec<_>, _>>()?;
        let mut opts = SearchOptions::new(specs);
        let o = &self.options;
        if let Some(v) = o.triangular_sequence_num_rows {
            opts.triangular_sequence_num_rows = v;
        }
        if let Some(v) = &o.index_multiples {
            opts.index_multiples = v.clone();
        }
        if let Some(v) = &o.index_offset_pairs {
            opts.index_offset_pairs = Some(v.clone());
        }
        opts.index_offset = o.index_offset;
        if let Some(v) = o.min_terms_warn {
            opts.min_terms_warn = v;
        }
        if let Some(v) = o.per_slot_cap {
            opts.per_slot_cap = v;
        }
        if let Some(v) = o.result_cap {
            opts.result_cap = v;
        }
        opts.budget = o.budget_ms.map(Duration::from_millis);
        if let Some(v) = o.include_reflections {
            opts.include_reflections = v;
        }
        Ok(opts)
    }
}

/// Command-line values that replace job fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub factors: Option<String>,
    pub num_rows: Option<usize>,
    pub index_multiples: Option<String>,
    pub offset_pairs: Option<String>,
    pub j0: Option<i64>,
    pub user_guess: Option<String>,
    pub normalize: Option<String>,
    pub budget_ms: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, job: &mut JobSpec) -> Result<(), JobError> {
        if let Some(f) = &self.factors {
            job.sequence_factors = f
                .split(',')
                .map(|s| FactorEntry::Id(s.trim().to_string()))
                .collect();
        }
        if let Some(n) = self.num_rows {
            job.options.triangular_sequence_num_rows = Some(n);
        }
        if let Some(m) = &self.index_multiples {
            let parsed = m
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| JobError::Flag {
                    flag: "--index-multiples",
                    message: e.to_string(),
                })?;
            job.options.index_multiples = Some(parsed);
        }
        if let Some(p) = &self.offset_pairs {
            job.options.index_offset_pairs =
                Some(parse_offset_pairs(p).map_err(|message| JobError::Flag {
                    flag: "--offset-pairs",
                    message,
                })?);
        }
        if let Some(j0) = self.j0 {
            job.options.index_offset = Some(j0);
        }
        if let Some(u) = &self.user_guess {
            job.user_guess_function = Some(u.clone());
        }
        if let Some(n) = &self.normalize {
            job.normalization = Some(n.parse().map_err(|message| JobError::Flag {
                flag: "--normalize",
                message,
            })?);
        }
        if let Some(b) = self.budget_ms {
            job.options.budget_ms = Some(b);
        }
        Ok(())
    }
}

/// `(u,l);(u,l)` is one tuple with a pair per factor slot; `|` separates tuples.
pub fn parse_offset_pairs(text: &str) -> Result<Vec<Vec<(i64, i64)>>, String> {
    text.split('|')
        .map(|tuple| {
            tuple
                .split(';')
                .map(|pair| {
                    let inner = pair
                        .trim()
                        .strip_prefix('(')
                        .and_then(|p| p.strip_suffix(')'))
                        .ok_or_else(|| format!("expected (u,l), found {:?}", pair.trim()))?;
                    let (u, l) = inner
                        .split_once(',')
                        .ok_or_else(|| format!("expected (u,l), found {:?}", pair.trim()))?;
                    let num = |s: &str| {
                        s.trim()
                            .parse::<i64>()
                            .map_err(|e| format!("{:?}: {e}", s.trim()))
                    };
                    Ok((num(u)?, num(l)?))
                })
                .collect()
        })
        .collect()
}
