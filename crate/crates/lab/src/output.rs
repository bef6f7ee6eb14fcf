//! `{config, result}` envelopes and their JSON, CSV and plain-text renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::cli::Format;
use crate::CliError;

/// Rows for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub config: &'a Value,
    pub result: &'a R,
}

pub fn emit<R: Serialize>(out: &mut dyn Write, format: Format, config: &Value, result: &R, table: impl FnOnce() -> Option<Table>) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&Envelope { config, result }).map_err(CliError::internal)?;
            writeln!(out, "{text}").map_err(CliError::internal)
        }
        Format::Csv => {
            let table = table().ok_or_else(|| CliError::usage("this subcommand has no CSV form; use --format json or pretty"))?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header).map_err(CliError::internal)?;
            for row in &table.rows {
                w.write_record(row).map_err(CliError::internal)?;
            }
            w.flush().map_err(CliError::internal)
        }
        Format::Pretty => {
            let value = serde_json::to_value(result).map_err(CliError::internal)?;
            let mut lines = Vec::new();
            flatten("", &value, &mut lines);
            for line in lines {
                writeln!(out, "{line}").map_err(CliError::internal)?;
            }
            Ok(())
        }
    }
}

/// Longest number array printed in full by the plain-text format.
const SHOWN_VALUES: usize = 8;

fn flatten(prefix: &str, value: &Value, lines: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, lines);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let shown: Vec<String> = items.iter().take(SHOWN_VALUES).map(Value::to_string).collect();
            let more = if items.len() > SHOWN_VALUES { format!(", ... ({} values)", items.len()) } else { String::new() };
            lines.push(format!("{prefix}: [{}{more}]", shown.join(", ")));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, lines);
            }
        }
        Value::String(s) => lines.push(format!("{prefix}: {s}")),
        other => lines.push(format!("{prefix}: {other}")),
    }
}

/// Shortest round-trip text of a float, as in the JSON output.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}
