//! Text formats: state files, filter files and the number format shared by
//! every writer.
//!
//! A state file is a JSON object with keys `"re"` and `"im"`, each a 4×4
//! row-major array in the basis order |00⟩, |01⟩, |10⟩, |11⟩. Numbers are
//! written with 17 significant digits so that doubles round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::linalg::{Mat2, Mat4, C64};
use crate::qstate::{LocalOperatorPair, TwoQubitDensityMatrix};
use crate::{Error, Result};

/// 17 significant digits in scientific notation, e.g. `-3.2460112481172600e-2`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0.0000000000000000e0"
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

fn write_block<const R: usize, const C: usize>(
    out: &mut String,
    get: impl Fn(usize, usize) -> C64,
) {
    let part = |out: &mut String, f: &dyn Fn(C64) -> f64| {
        out.push('[');
        for r in 0..R {
            if r > 0 {
                out.push_str(", ");
            }
            out.push('[');
            for c in 0..C {
                if c > 0 {
                    out.push_str(", ");
                }
                out.push_str(&fmt_f64(f(get(r, c))));
            }
            out.push(']');
        }
        out.push(']');
    };
    out.push_str("{\"re\": ");
    part(out, &|z| z.re);
    out.push_str(", \"im\": ");
    part(out, &|z| z.im);
    out.push('}');
}

pub fn state_to_json(rho: &TwoQubitDensityMatrix) -> String {
    let mut out = String::new();
    write_block::<4, 4>(&mut out, |r, c| rho.entry(r, c));
    out.push('\n');
    out
}

fn parse_block(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Vec<C64>> {
    let part = |key: &str| -> Result<Vec<f64>> {
        let arr = v
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("{what}: missing array \"{key}\"")))?;
        if arr.len() != rows {
            return Err(Error::Parse(format!(
                "{what}: \"{key}\" must have {rows} rows, found {}",
                arr.len()
            )));
        }
        let mut out = Vec::with_capacity(rows * cols);
        for row in arr {
            let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(|| {
                Error::Parse(format!("{what}: \"{key}\" rows must have {cols} entries"))
            })?;
            for x in row {
                out.push(x.as_f64().ok_or_else(|| {
                    Error::Parse(format!("{what}: non-numeric entry in \"{key}\""))
                })?);
            }
        }
        Ok(out)
    };
    let re = part("re")?;
    let im = part("im")?;
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| C64::new(r, i))
        .collect())
}

pub fn state_from_json(text: &str) -> Result<TwoQubitDensityMatrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let entries = parse_block(&v, 4, 4, "state")?;
    TwoQubitDensityMatrix::new(Mat4::from_row_slice(&entries))
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<TwoQubitDensityMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    state_from_json(&text).map_err(|e| e.context(format!("reading {}", path.display())))
}

pub fn write_state_file(path: impl AsRef<Path>, rho: &TwoQubitDensityMatrix) -> Result<()> {
    write_text(path, &state_to_json(rho))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Filter file: local filters, success probability, convergence flag and the
/// filtered state.
#[derive(Clone, Debug)]
pub struct FilterRecord {
    pub filters: LocalOperatorPair,
    pub p_succ: f64,
    pub converged: bool,
    pub normal_form: TwoQubitDensityMatrix,
}

pub fn filters_to_json(rec: &FilterRecord) -> String {
    let mut out = String::from("{\n  \"fA\": ");
    write_block::<2, 2>(&mut out, |r, c| rec.filters.f_a[(r, c)]);
    out.push_str(",\n  \"fB\": ");
    write_block::<2, 2>(&mut out, |r, c| rec.filters.f_b[(r, c)]);
    let _ = write!(
        out,
        ",\n  \"p_succ\": {},\n  \"converged\": {},\n  \"normal_form\": ",
        fmt_f64(rec.p_succ),
        rec.converged
    );
    write_block::<4, 4>(&mut out, |r, c| rec.normal_form.entry(r, c));
    out.push_str("\n}\n");
    out
}

pub fn filters_from_json(text: &str) -> Result<FilterRecord> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let block2 = |key: &str| -> Result<Mat2> {
        let inner = v
            .get(key)
            .ok_or_else(|| Error::Parse(format!("missing \"{key}\"")))?;
        Ok(Mat2::from_row_slice(&parse_block(inner, 2, 2, key)?))
    };
    let filters = LocalOperatorPair::new(block2("fA")?, block2("fB")?)?;
    let p_succ = v
        .get("p_succ")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse("missing number \"p_succ\"".into()))?;
    let converged = v
        .get("converged")
        .and_then(Value::as_bool)
        .ok_or_else(|| Error::Parse("missing bool \"converged\"".into()))?;
    let nf = v
        .get("normal_form")
        .ok_or_else(|| Error::Parse("missing \"normal_form\"".into()))?;
    let normal_form =
        TwoQubitDensityMatrix::new(Mat4::from_row_slice(&parse_block(nf, 4, 4, "normal_form")?))?;
    Ok(FilterRecord {
        filters,
        p_succ,
        converged,
        normal_form,
    })
}

/// Parses `key=value` lines. Blank lines and lines starting with `#` are
/// skipped; whitespace around keys and values is ignored.
pub fn parse_key_value(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", no + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", no + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn write_key_value<'a>(pairs: impl IntoIterator<Item = (&'a str, String)>) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}
