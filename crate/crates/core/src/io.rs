//! On-disk formats shared by the command-line tools: matrices as JSON
//! objects `{"m": ..., "rows": [[...], ...]}` or as CSV (`m` rows of `m`
//! comma-separated reals), and shape-generator specifications as JSON
//! `{"kind": ..., "params": {...}}`.
//!
//! Matrix files are sniffed by content, not extension: input starting with
//! `{` is parsed as JSON, anything else as CSV.  Generator specifications
//! never carry the distribution's `(n, m)`; those are bound at load time
//! from the caller so one file can serve many settings.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::generator::ShapeGenerator;
use crate::matrix::{SpdMatrix, SymMatrix, DEFAULT_SYM_TOL};

/// Parses matrix text in either accepted format.
pub fn parse_matrix(text: &str) -> Result<SymMatrix> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let sym: SymMatrix = serde_json::from_str(trimmed)?;
        Ok(sym)
    } else {
        parse_matrix_csv(text)
    }
}

fn parse_matrix_csv(text: &str) -> Result<SymMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: cannot parse {:?} as a real number",
                        lineno + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file contains no rows".into()));
    }
    let m = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {m} (square matrix)",
                i + 1,
                row.len()
            )));
        }
    }
    SymMatrix::from_rows(&rows, DEFAULT_SYM_TOL)
}

/// Reads a symmetric matrix from a JSON or CSV file.
pub fn read_sym_matrix(path: &Path) -> Result<SymMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a matrix that must be symmetric positive definite.
pub fn read_spd_matrix(path: &Path) -> Result<SpdMatrix> {
    let sym = read_sym_matrix(path)?;
    SpdMatrix::new(sym)
}

/// Renders a matrix as one compact JSON line in the on-disk format, for
/// JSON-lines streams.
pub fn matrix_json_line(rows: &[Vec<f64>]) -> String {
    #[derive(serde::Serialize)]
    struct Repr<'a> {
        m: usize,
        rows: &'a [Vec<f64>],
    }
    serde_json::to_string(&Repr {
        m: rows.len(),
        rows,
    })
    .expect("matrix serialization cannot fail")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    kind: String,
    #[serde(default)]
    params: serde_json::Map<String, serde_json::Value>,
}

fn param_f64(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Parse(format!("generator parameter {key:?} missing or not a number")))
}

fn param_vec(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<Vec<f64>> {
    let arr = params
        .get(key)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse(format!("generator parameter {key:?} missing or not an array")))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::Parse(format!("generator parameter {key:?} has a non-numeric entry")))
        })
        .collect()
}

/// Parses a generator specification and binds it to `(n, m)`.
///
/// Accepted kinds and parameters:
/// `exponential`; `t_prime` with `p`; `power` with `a, b`; `kummer` with
/// `a, b`; `logistic` with `a, b`; `sin_gaussian` with `a, b`; `log_exp`;
/// `hypergeom_exp` with arrays `a, b` and scale `c`; `custom` with `name`
/// (resolved through the global shape registry — configuration files never
/// carry code).
pub fn parse_generator(json: &str, n: f64, m: usize) -> Result<ShapeGenerator> {
    let spec: GeneratorSpec = serde_json::from_str(json)
        .map_err(|e| Error::Parse(format!("generator specification: {e}")))?;
    let p = &spec.params;
    match spec.kind.as_str() {
        "exponential" => ShapeGenerator::exponential(n, m),
        "t_prime" => ShapeGenerator::t_prime(param_f64(p, "p")?, n, m),
        "power" => ShapeGenerator::power(param_f64(p, "a")?, param_f64(p, "b")?, n, m),
        "kummer" => ShapeGenerator::kummer(param_f64(p, "a")?, param_f64(p, "b")?, n, m),
        "logistic" => ShapeGenerator::logistic(param_f64(p, "a")?, param_f64(p, "b")?, n, m),
        "sin_gaussian" => {
            ShapeGenerator::sin_gaussian(param_f64(p, "a")?, param_f64(p, "b")?, n, m)
        }
        "log_exp" => ShapeGenerator::log_exp(n, m),
        "hypergeom_exp" => ShapeGenerator::hypergeom_exp(
            param_vec(p, "a")?,
            param_vec(p, "b")?,
            param_f64(p, "c")?,
            n,
            m,
        ),
        "custom" => {
            let name = p
                .get("name")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse("custom generator needs a string \"name\"".into()))?;
            ShapeGenerator::custom(name, n, m)
        }
        other => Err(Error::Parse(format!(
            "unknown generator kind {other:?} (expected one of exponential, t_prime, power, \
             kummer, logistic, sin_gaussian, log_exp, hypergeom_exp, custom)"
        ))),
    }
}
