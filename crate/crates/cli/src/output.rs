//! Report serialization. JSON is canonical; CSV is a projection.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

pub fn write_bytes(bytes: &[u8], dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        Some(path) => std::fs::write(path, bytes).map_err(CliError::io(format!("writing {}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(CliError::io("writing standard output"))
        }
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn rows_to_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

/// `field,value` pairs with dotted paths for nested JSON.
pub fn flat_csv<S: Serialize>(value: &S) -> Result<Vec<u8>, CliError> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |key: &str| {
            if prefix.is_empty() {
                key.to_owned()
            } else {
                format!("{prefix}.{key}")
            }
        };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&join(k), v, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&join(&i.to_string()), v, out)),
            Value::String(s) => out.push((prefix.to_owned(), s.clone())),
            Value::Null => out.push((prefix.to_owned(), String::new())),
            other => out.push((prefix.to_owned(), other.to_string())),
        }
    }
    let mut pairs = Vec::new();
    walk("", &serde_json::to_value(value)?, &mut pairs);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"])?;
    for (k, v) in pairs {
        w.write_record([k, v])?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

/// Emits a report; tabular reports project `rows` to CSV, others flatten.
pub fn emit<S: Serialize, R: Serialize>(
    report: &S,
    rows: Option<&[R]>,
    format: Format,
    dest: Option<&Path>,
) -> Result<(), CliError> {
    let bytes = match (format, rows) {
        (Format::Json, _) => to_json(report)?,
        (Format::Csv, Some(rows)) => rows_to_csv(rows)?,
        (Format::Csv, None) => flat_csv(report)?,
    };
    write_bytes(&bytes, dest)
}
