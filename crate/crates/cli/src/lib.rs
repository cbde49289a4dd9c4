//! Job-file front end for `seqguess`.

pub mod job;
pub mod oeis;
pub mod report;

use thiserror::Error;

use seqguess::search::SearchError;
use seqguess::{guess_polynomial_sequence, verify_formula};

pub use job::{JobError, JobSpec, Overrides};
pub use report::{FormulaReport, RunReport, Status};

/// Exit status for rejected input.
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Job(#[from] JobError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("cannot load report {path}: {message}")]
    Report { path: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT_ERROR
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSettings {
    pub oeis: bool,
}

/// Normalize, search and render one job.
pub fn run_job(job: &JobSpec, settings: &RunSettings) -> Result<RunReport, RunError> {
    let seq = job.sequence()?;
    let opts = job.search_options()?;
    let outcome = guess_polynomial_sequence(&seq, &opts)?;
    let status = if !outcome.formulas.is_empty() {
        Status::Found
    } else if outcome.budget_exceeded {
        Status::BudgetExceeded
    } else {
        Status::NoMatch
    };
    let mut report = RunReport::new(status, seq.var(), seq.start_index(), seq.len());
    report.normalization = seq.normalization().iter().map(|n| n.to_string()).collect();
    report.formulas = outcome
        .formulas
        .into_iter()
        .map(|f| FormulaReport::new(f, true, seq.len()))
        .collect();
    report.warnings = outcome.warnings;
    if settings.oeis {
        for values in outcome.unrecognized_remainders.iter().take(3) {
            match oeis::oeis_lookup(values, true, oeis::DEFAULT_TIMEOUT) {
                Ok(l) => {
                    report.diagnostics.extend(l.diagnostics);
                    report.oeis.push(report::OeisAnnotation {
                        values: values.iter().map(|v| v.to_string()).collect(),
                        matches: l.matches,
                    });
                }
                Err(e) => report.diagnostics.push(e.to_string()),
            }
        }
    }
    Ok(report)
}

/// Re-check the formulas of a stored report against the job without searching.
pub fn verify_report(job: &JobSpec, stored: &RunReport) -> Result<RunReport, RunError> {
    let seq = job.sequence()?;
    let mut report = RunReport::new(Status::NoMatch, seq.var(), seq.start_index(), seq.len());
    report.normalization = seq.normalization().iter().map(|n| n.to_string()).collect();
    report.formulas = stored
        .formulas
        .iter()
        .map(|r| {
            FormulaReport::new(
                r.formula.clone(),
                verify_formula(&r.formula, &seq),
                seq.len(),
            )
        })
        .collect();
    if !report.formulas.is_empty() && report.formulas.iter().all(|f| f.verified) {
        report.status = Status::Found;
    } else {
        report
            .warnings
            .push("some stored formulas do not reproduce the job's polynomials".to_string());
    }
    Ok(report)
}

pub fn load_report(path: &str) -> Result<RunReport, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Report {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let report = RunReport::from_json(&text).map_err(|e| RunError::Report {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    if report.format_version != job::FORMAT_VERSION {
        return Err(RunError::Report {
            path: path.to_string(),
            message: format!("unsupported format_version {:?}", report.format_version),
        });
    }
    Ok(report)
}
