//! Optional OEIS lookup. Results annotate reports and never enter formulas.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const MIN_VALUES: usize = 4;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);
const ENDPOINT: &str = "https://oeis.org/search";
const MAX_MATCHES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OeisMatch {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OeisError {
    #[error("an OEIS lookup needs at least {MIN_VALUES} values, got {0}")]
    TooFewValues(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lookup {
    pub matches: Vec<OeisMatch>,
    pub diagnostics: Vec<String>,
}

/// Best-effort search. Network and format failures come back as diagnostics.
pub fn oeis_lookup<T: ToString>(
    values: &[T],
    enabled: bool,
    timeout: Duration,
) -> Result<Lookup, OeisError> {
    if values.len() < MIN_VALUES {
        return Err(OeisError::TooFewValues(values.len()));
    }
    if !enabled {
        return Ok(Lookup {
            matches: Vec::new(),
            diagnostics: vec!["oeis disabled".to_string()],
        });
    }
    let query = values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let body = agent
        .get(ENDPOINT)
        .query("q", &query)
        .query("fmt", "json")
        .call()
        .map_err(|e| e.to_string())
        .and_then(|r| r.into_string().map_err(|e| e.to_string()));
    let diagnostics_for = |msg: String| Lookup {
        matches: Vec::new(),
        diagnostics: vec![format!("oeis lookup for [{query}] failed: {msg}")],
    };
    match body {
        Err(e) => Ok(diagnostics_for(e)),
        Ok(text) => match serde_json::from_str::<Value>(&text) {
            Err(e) => Ok(diagnostics_for(e.to_string())),
            Ok(v) => Ok(Lookup {
                matches: parse_results(&v),
                diagnostics: Vec::new(),
            }),
        },
    }
}

/// Accepts both the bare result array and the older `{"results": [...]}` shape.
fn parse_results(v: &Value) -> Vec<OeisMatch> {
    let entries = match v {
        Value::Array(a) => a.as_slice(),
        Value::Object(o) => match o.get("results") {
            Some(Value::Array(a)) => a.as_slice(),
            _ => &[],
        },
        _ => &[],
    };
    entries
        .iter()
        .filter_map(|e| {
            let number = e.get("number")?.as_u64()?;
            let name = e.get("name").and_then(Value::as_str).unwrap_or_default();
            Some(OeisMatch {
                id: format!("A{number:06}"),
                name: name.to_string(),
            })
        })
        .take(MAX_MATCHES)
        .collect()
}
