use std::fs;
use std::io::Write;

use serde_json::Value;

use crate::{Format, Global};

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn cell(v: &Value) -> CliResult<String> {
    match v {
        Value::Null => Ok(String::new()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(CliError("nested value has no csv form; use --format json".into())),
    }
}

/// Objects become one row, lists of objects one row each.
fn to_csv(v: &Value) -> CliResult<String> {
    let rows: Vec<&serde_json::Map<String, Value>> = match v {
        Value::Object(m) => vec![m],
        Value::Array(items) => items
            .iter()
            .map(|i| i.as_object().ok_or_else(|| CliError("csv rows must be objects".into())))
            .collect::<CliResult<_>>()?,
        other => return Ok(format!("value\n{}\n", cell(other)?)),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys())?;
    }
    for r in rows {
        let cells = r.values().map(cell).collect::<CliResult<Vec<_>>>()?;
        w.write_record(cells)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError(e.to_string()))?).map_err(Into::into)
}

pub fn render(global: &Global, v: &Value) -> CliResult<String> {
    match global.format {
        Format::Json => Ok(serde_json::to_string_pretty(v)? + "\n"),
        Format::Csv => to_csv(v),
    }
}

/// Prints to stdout, or writes to `--out` when given.
pub fn emit(global: &Global, v: &Value) -> CliResult<()> {
    let text = render(global, v)?;
    match &global.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
