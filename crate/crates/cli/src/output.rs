//! Run-directory contents. Files are assembled in memory and written in
//! one pass once the run has finished, so a failed run leaves only its
//! manifest behind.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const REPORTS: &str = "reports.jsonl";
pub const REPORTS_VERSION: u32 = 1;
pub const MANIFEST_VERSION: u32 = 1;

/// A versioned CSV layout: column names with their units.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub file: &'static str,
    pub version: u32,
    pub columns: Vec<(String, &'static str)>,
}

fn cols(list: &[(&str, &'static str)]) -> Vec<(String, &'static str)> {
    list.iter().map(|(n, u)| (n.to_string(), *u)).collect()
}

impl Schema {
    pub fn energy() -> Self {
        Self {
            file: "energy.csv",
            version: 1,
            columns: cols(&[
                ("time", "time"),
                ("kinetic", "energy"),
                ("bending", "energy"),
                ("mass", "energy"),
                ("potential", "energy"),
                ("total", "energy"),
            ]),
        }
    }

    pub fn drift() -> Self {
        Self {
            file: "drift.csv",
            version: 1,
            columns: cols(&[
                ("sigma", "length"),
                ("delta", "time"),
                ("sup_drift", "energy"),
                ("ratio", "dimensionless"),
            ]),
        }
    }

    pub fn radius() -> Self {
        Self {
            file: "radius.csv",
            version: 1,
            columns: cols(&[
                ("time", "time"),
                ("sigma_est", "length"),
                ("residual", "ln(amplitude) rms"),
                ("n_modes", "count"),
                ("capped", "bool"),
            ]),
        }
    }

    pub fn lower_bound() -> Self {
        Self {
            file: "lower_bound.csv",
            version: 1,
            columns: cols(&[
                ("time", "time"),
                ("lower_bound", "length"),
                ("sigma_est", "length"),
                ("holds", "bool"),
            ]),
        }
    }

    /// `k0[,k1[,k2]],abs_coeff,log_abs_coeff`, rows in the grid's flat
    /// coefficient order.
    pub fn spectrum(dim: usize) -> Self {
        let mut columns: Vec<(String, &'static str)> =
            (0..dim).map(|i| (format!("k{i}"), "wavenumber index")).collect();
        columns.push(("abs_coeff".into(), "amplitude"));
        columns.push(("log_abs_coeff".into(), "ln(amplitude)"));
        Self {
            file: "spectrum.csv",
            version: 1,
            columns,
        }
    }

    fn describe(&self) -> Value {
        json!({
            "version": self.version,
            "columns": self.columns.iter().map(|(n, u)| json!({"name": n, "unit": u})).collect::<Vec<_>>(),
        })
    }
}

/// Shortest round-trip text for a float, in exponent form outside
/// `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Default)]
pub struct RunOutputs {
    files: BTreeMap<String, Vec<u8>>,
    schemas: BTreeMap<String, Value>,
    reports: Vec<String>,
}

impl RunOutputs {
    pub fn csv(&mut self, schema: &Schema, rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(schema.columns.iter().map(|(n, _)| n.as_str()))?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        self.files.insert(schema.file.into(), bytes);
        self.schemas.insert(schema.file.into(), schema.describe());
        Ok(())
    }

    /// Appends one JSON-lines record tagged with `kind`.
    pub fn report(&mut self, kind: &str, body: &impl Serialize) -> Result<(), CliError> {
        let mut v = serde_json::to_value(body)?;
        let record = match v.as_object_mut() {
            Some(map) => {
                let mut tagged = serde_json::Map::new();
                tagged.insert("kind".into(), kind.into());
                tagged.append(map);
                Value::Object(tagged)
            }
            None => json!({"kind": kind, "value": v}),
        };
        self.reports.push(serde_json::to_string(&record)?);
        Ok(())
    }

    pub fn file_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.files.keys().cloned().collect();
        if !self.reports.is_empty() {
            names.push(REPORTS.into());
        }
        names
    }

    pub fn schemas(&self) -> Value {
        let mut s = self.schemas.clone();
        if !self.reports.is_empty() {
            s.insert(REPORTS.into(), json!({"version": REPORTS_VERSION}));
        }
        json!(s)
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        if !self.reports.is_empty() {
            let mut text = self.reports.join("\n");
            text.push('\n');
            fs::write(dir.join(REPORTS), text)?;
        }
        Ok(())
    }
}

pub fn write_manifest(dir: &Path, manifest: &Value) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-13, 3.0e20, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1e-13), "1e-13");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_header_and_reports_are_tagged() {
        let mut out = RunOutputs::default();
        out.csv(&Schema::drift(), vec![vec!["0.1".into(), "1".into(), "2".into(), "3".into()]])
            .unwrap();
        out.report("summary", &json!({"slope": 2.0})).unwrap();
        let text = String::from_utf8(out.files["drift.csv"].clone()).unwrap();
        assert_eq!(text, "sigma,delta,sup_drift,ratio\n0.1,1,2,3\n");
        assert_eq!(out.reports[0], r#"{"kind":"summary","slope":2.0}"#);
        assert_eq!(out.file_names(), vec!["drift.csv", "reports.jsonl"]);
    }
}
