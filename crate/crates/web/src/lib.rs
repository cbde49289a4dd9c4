//! Browser bindings: triangle rows, single-value factorization and formula guessing.
//!
//! Each export returns a JSON string. The plain functions are the tested surface;
//! the `wasm_bindgen` wrappers only convert errors.

use num_bigint::BigInt;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use seqguess::factorizer::factor_over_triangles;
use seqguess::numbers::parse_rational;
use seqguess::render::formula_text;
use seqguess::{
    build_triangle, guess_polynomial_sequence, PolySeq, SearchOptions, TriangleSpec, TriangleTable,
};

/// Rows shown or searched are limited so a page never stalls.
pub const MAX_ROWS: usize = 60;

fn rows_in_range(rows: usize) -> Result<usize, String> {
    if rows == 0 || rows > MAX_ROWS {
        return Err(format!("rows must be between 1 and {MAX_ROWS}"));
    }
    Ok(rows)
}

fn parse_integer(text: &str) -> Result<BigInt, String> {
    match parse_rational(text.trim()) {
        Some(r) if r.is_integer() => Ok(r.to_integer()),
        _ => Err(format!("{text:?} is not an integer")),
    }
}

fn specs(ids: &str) -> Result<Vec<TriangleSpec>, String> {
    ids.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|id| TriangleSpec::builtin(id).map_err(|e| e.to_string()))
        .collect()
}

/// `{"name", "rows": [[...], ...]}` with entries as decimal strings.
pub fn triangle_rows_json(id: &str, rows: usize) -> Result<String, String> {
    let spec = TriangleSpec::builtin(id.trim()).map_err(|e| e.to_string())?;
    let table = build_triangle(&spec, rows_in_range(rows)?);
    let body: Vec<Vec<String>> = (0..table.num_rows())
        .map(|n| {
            table
                .row(n)
                .unwrap_or_default()
                .iter()
                .map(|v| v.to_string())
                .collect()
        })
        .collect();
    Ok(json!({ "name": spec.name, "rows": body }).to_string())
}

/// Every way to write `value` as one entry per listed triangle times a remainder.
pub fn factorize_json(value: &str, ids: &str, rows: usize) -> Result<String, String> {
    let v = parse_integer(value)?;
    let specs = specs(ids)?;
    let rows = rows_in_range(rows)?;
    let tables: Vec<TriangleTable> = specs.iter().map(|s| build_triangle(s, rows)).collect();
    let refs: Vec<&TriangleTable> = tables.iter().collect();
    let found = factor_over_triangles(&v, &refs).map_err(|e| e.to_string())?;
    let items: Vec<Value> = found
        .iter()
        .map(|d| {
            json!({
                "factors": d.factors.iter().map(|f| json!({
                    "triangle": f.triangle, "n": f.n, "k": f.k, "value": f.value.to_string()
                })).collect::<Vec<_>>(),
                "remainder": d.remainder.to_string(),
            })
        })
        .collect();
    Ok(json!({ "value": v.to_string(), "decompositions": items }).to_string())
}

/// Guess formulas for one polynomial per line, the first line being `p_start`.
pub fn guess_json(
    polys: &str,
    variable: &str,
    start: i64,
    ids: &str,
    rows: usize,
) -> Result<String, String> {
    let lines: Vec<&str> = polys
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    let seq = PolySeq::parse(&lines, variable.trim(), start).map_err(|e| e.to_string())?;
    let mut opts = SearchOptions::new(specs(ids)?);
    opts.triangular_sequence_num_rows = rows_in_range(rows)?;
    let outcome = guess_polynomial_sequence(&seq, &opts).map_err(|e| e.to_string())?;
    let formulas: Vec<String> = outcome.formulas.iter().map(formula_text).collect();
    Ok(json!({ "formulas": formulas, "warnings": outcome.warnings }).to_string())
}

#[wasm_bindgen]
pub fn triangle_rows(id: &str, rows: usize) -> Result<String, JsError> {
    triangle_rows_json(id, rows).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn factorize(value: &str, ids: &str, rows: usize) -> Result<String, JsError> {
    factorize_json(value, ids, rows).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn guess(
    polys: &str,
    variable: &str,
    start: i64,
    ids: &str,
    rows: usize,
) -> Result<String, JsError> {
    guess_json(polys, variable, start, ids, rows).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn stirling_rows() {
        let v = parse(&triangle_rows_json("S1", 5).unwrap());
        assert_eq!(v["rows"][4], json!(["0", "6", "11", "6", "1"]));
        assert!(triangle_rows_json("S9", 5).is_err());
        assert!(triangle_rows_json("S1", 0).is_err());
    }

    #[test]
    fn factorization_lists_remainders() {
        let v = parse(&factorize_json("-16", "S1, Binom2", 12).unwrap());
        let ds = v["decompositions"].as_array().unwrap();
        assert!(ds.iter().any(|d| d["factors"][0]["n"] == 4
            && d["factors"][0]["k"] == 4
            && d["factors"][1]["n"] == 4
            && d["factors"][1]["k"] == 1
            && d["remainder"] == "-1"));
        assert!(factorize_json("1/2", "S1", 12).is_err());
        assert!(factorize_json("0", "S1", 12).is_err());
    }

    #[test]
    fn guesses_bell_polynomials() {
        let polys = "x\nx + x^2\nx + 3*x^2 + x^3\nx + 7*x^2 + 6*x^3 + x^4\nx + 15*x^2 + 25*x^3 + 10*x^4 + x^5\nx + 31*x^2 + 90*x^3 + 65*x^4 + 15*x^5 + x^6";
        let v = parse(&guess_json(polys, "x", 1, "S2", 12).unwrap());
        assert_eq!(v["formulas"][0], "Sum[i=0..j] S2[j, i] * x^i");
    }
}
