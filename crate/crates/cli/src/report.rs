//! Text and structured renderings of a run.

use serde::{Deserialize, Serialize};

use seqguess::render::formula_text;
use seqguess::Formula;

use crate::job::FORMAT_VERSION;
use crate::oeis::OeisMatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    NoMatch,
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Found => 0,
            Status::NoMatch => 1,
            Status::BudgetExceeded => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaReport {
    pub text: String,
    pub verified: bool,
    pub polynomials_checked: usize,
    pub formula: Formula,
}

impl FormulaReport {
    pub fn new(formula: Formula, verified: bool, polynomials_checked: usize) -> Self {
        FormulaReport {
            text: formula_text(&formula),
            verified,
            polynomials_checked,
            formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OeisAnnotation {
    pub values: Vec<String>,
    pub matches: Vec<OeisMatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: String,
    pub status: Status,
    pub variable: String,
    pub start_index: i64,
    pub polynomials_checked: usize,
    /// Human-readable transforms applied before the search, in order.
    pub normalization: Vec<String>,
    pub formulas: Vec<FormulaReport>,
    pub warnings: Vec<String>,
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oeis: Vec<OeisAnnotation>,
}

impl RunReport {
    pub fn new(
        status: Status,
        variable: &str,
        start_index: i64,
        polynomials_checked: usize,
    ) -> Self {
        RunReport {
            format_version: FORMAT_VERSION.to_string(),
            status,
            variable: variable.to_string(),
            start_index,
            polynomials_checked,
            normalization: Vec::new(),
            formulas: Vec::new(),
            warnings: Vec::new(),
            diagnostics: Vec::new(),
            oeis: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.normalization {
            out.push_str(&format!("normalization: {n}\n"));
        }
        for (idx, f) in self.formulas.iter().enumerate() {
            let mark = if f.verified {
                "verified"
            } else {
                "NOT verified"
            };
            out.push_str(&format!(
                "formula {}: {}  [{mark} on {} polynomials]\n",
                idx + 1,
                f.text,
                f.polynomials_checked
            ));
        }
        if self.formulas.is_empty() {
            out.push_str("no formula found\n");
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        for a in &self.oeis {
            let ids: Vec<String> = a
                .matches
                .iter()
                .map(|m| format!("{} {}", m.id, m.name))
                .collect();
            out.push_str(&format!(
                "oeis [{}]: {}\n",
                a.values.join(", "),
                ids.join("; ")
            ));
        }
        out
    }
}
