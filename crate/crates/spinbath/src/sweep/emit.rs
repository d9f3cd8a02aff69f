//! Deterministic output writers.
//!
//! CSV is wide format: one column per series, rows ordered by axis value
//! then time. All floating-point values are printed with 17 significant
//! digits so they round-trip bit-exactly; the same input always yields
//! byte-identical files regardless of worker count.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{metadata_string, ResultTable, SweepAxis, SweepSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// 17 significant digits; round-trips any f64.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_axis(axis: SweepAxis, v: f64) -> String {
    match axis {
        SweepAxis::BathSize => format!("{}", v as i64),
        _ => fmt_value(v),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn group_error(errors: &[Option<String>], labels: &[String]) -> String {
    let parts: Vec<String> = errors
        .iter()
        .zip(labels)
        .filter_map(|(e, l)| e.as_ref().map(|msg| format!("{l}: {msg}")))
        .collect();
    parts.join("; ")
}

/// Renders the table as CSV.
pub fn csv_string(table: &ResultTable) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = vec![table.axis.token().to_string()];
    if table.observable.is_series() {
        header.push("t".into());
    }
    for label in &table.series_labels {
        header.push(csv_field(label));
    }
    header.push("error".into());
    out.push_str(&header.join(","));
    out.push('\n');

    for g in &table.groups {
        let axis_field = fmt_axis(table.axis, g.axis_value);
        let error_field = csv_field(&group_error(&g.errors, &table.series_labels));
        match &g.times {
            Some(times) => {
                for (i, &t) in times.iter().enumerate() {
                    let mut row = vec![axis_field.clone(), fmt_value(t)];
                    for series in &g.values {
                        row.push(series.get(i).map(|&v| fmt_value(v)).unwrap_or_default());
                    }
                    row.push(error_field.clone());
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            None => {
                let mut row = vec![axis_field];
                for series in &g.values {
                    row.push(series.first().map(|&v| fmt_value(v)).unwrap_or_default());
                }
                row.push(error_field);
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
    }
    out
}

/// Renders the table as JSON, nested by axis value.
pub fn json_string(table: &ResultTable) -> Result<String> {
    let points: Vec<Value> = table
        .groups
        .iter()
        .map(|g| {
            let mut obj = Map::new();
            obj.insert("axis_value".into(), json!(g.axis_value));
            if let Some(times) = &g.times {
                obj.insert("t".into(), json!(times));
            }
            let mut values = Map::new();
            let mut errors = Map::new();
            for ((label, series), err) in table
                .series_labels
                .iter()
                .zip(&g.values)
                .zip(&g.errors)
            {
                if let Some(msg) = err {
                    errors.insert(label.clone(), json!(msg));
                } else if g.times.is_some() {
                    values.insert(label.clone(), json!(series));
                } else {
                    values.insert(label.clone(), json!(series.first()));
                }
            }
            obj.insert("values".into(), Value::Object(values));
            if !errors.is_empty() {
                obj.insert("errors".into(), Value::Object(errors));
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "axis": table.axis.token(),
        "observable": table.observable.token(),
        "series": table.series_labels,
        "points": points,
    });
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Config(format!("json serialization failed: {e}")))
}

/// Writes the table to `dest` in the requested format, plus a sidecar
/// `<dest>.meta` holding the resolved configuration and version.
pub fn emit(
    table: &ResultTable,
    spec: &SweepSpec,
    format: OutputFormat,
    dest: &Path,
    version: &str,
) -> Result<()> {
    let body = match format {
        OutputFormat::Csv => csv_string(table),
        OutputFormat::Json => json_string(table)?,
    };
    fs::write(dest, body).map_err(|e| {
        Error::Config(format!("cannot write output '{}': {e}", dest.display()))
    })?;
    let meta_path = sidecar_path(dest);
    fs::write(&meta_path, metadata_string(spec, version)).map_err(|e| {
        Error::Config(format!("cannot write metadata '{}': {e}", meta_path.display()))
    })?;
    Ok(())
}

/// `<dest>.meta`
pub fn sidecar_path(dest: &Path) -> std::path::PathBuf {
    let mut name = dest.as_os_str().to_os_string();
    name.push(".meta");
    std::path::PathBuf::from(name)
}
