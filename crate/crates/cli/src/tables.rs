//! JSON form of pair tables:
//!
//! ```json
//! {"alphabet": ["A", "C"], "counts": [2, 1],
//!  "adjacent": [[1, 1], [0, 0]], "global": [["1", "2"], ["0", "0"]]}
//! ```
//!
//! Row `x`, column `y` counts `x` followed by `y`. Global entries may be JSON
//! integers or decimal strings, since they outgrow 64 bits.

use std::path::Path;

use num_bigint::BigUint;
use serde_json::{json, Value};

use multiperm::{Alphabet, PairTables};

use crate::error::{CliError, Result};

fn malformed(detail: impl Into<String>) -> CliError {
    CliError::Malformed {
        what: "pair tables",
        detail: detail.into(),
    }
}

fn big(value: &Value) -> Result<BigUint> {
    match value {
        Value::String(s) => s
            .parse()
            .map_err(|_| malformed(format!("{s:?} is not a non-negative integer"))),
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| malformed(format!("{n} is not a non-negative integer"))),
        other => Err(malformed(format!("expected an integer, got {other}"))),
    }
}

fn small(value: &Value) -> Result<u64> {
    u64::try_from(big(value)?).map_err(|_| malformed("adjacent count exceeds 64 bits"))
}

fn matrix<T>(
    value: &Value,
    h: usize,
    name: &str,
    cell: impl Fn(&Value) -> Result<T>,
) -> Result<Vec<T>> {
    let rows = value
        .as_array()
        .ok_or_else(|| malformed(format!("{name} must be an array of rows")))?;
    if rows.len() != h {
        return Err(malformed(format!(
            "{name} has {} rows, alphabet has {h} symbols",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(h * h);
    for row in rows {
        let row = row
            .as_array()
            .filter(|r| r.len() == h)
            .ok_or_else(|| malformed(format!("{name} rows must have {h} entries")))?;
        for v in row {
            out.push(cell(v)?);
        }
    }
    Ok(out)
}

/// Parses and validates pair tables.
pub fn tables_from_json(value: &Value) -> Result<(Alphabet, PairTables)> {
    let labels = value["alphabet"]
        .as_array()
        .ok_or_else(|| malformed("missing \"alphabet\" array"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| malformed("alphabet entries must be strings"))
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = Alphabet::new(labels)?;
    let h = alphabet.len();
    let counts = value["counts"]
        .as_array()
        .filter(|c| c.len() == h)
        .ok_or_else(|| malformed(format!("\"counts\" must list {h} integers")))?
        .iter()
        .map(small)
        .collect::<Result<Vec<_>>>()?;
    let adjacent = matrix(&value["adjacent"], h, "adjacent", small)?;
    let global = matrix(&value["global"], h, "global", big)?;
    let tables = PairTables::from_parts(counts, adjacent, global)?;
    Ok((alphabet, tables))
}

pub fn read_tables(path: &Path) -> Result<(Alphabet, PairTables)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    tables_from_json(&value)
}

pub fn tables_to_json(alphabet: &Alphabet, tables: &PairTables) -> Value {
    let h = tables.h();
    let adjacent: Vec<Vec<u64>> = (0..h)
        .map(|x| (0..h).map(|y| tables.adjacent(x, y)).collect())
        .collect();
    let global: Vec<Vec<String>> = (0..h)
        .map(|x| (0..h).map(|y| tables.global(x, y).to_string()).collect())
        .collect();
    json!({
        "alphabet": alphabet.symbols(),
        "counts": tables.counts(),
        "adjacent": adjacent,
        "global": global,
    })
}
