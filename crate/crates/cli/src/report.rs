use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::config::Format;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// 15 significant digits, positional notation for moderate magnitudes.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        format!("{:.*}", (14 - mag) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => f17(*x),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) => json!(x),
        }
    }
}

/// A table written as `<name>.csv`, or as `<name>.json` with provenance.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Map<String, Value>,
    /// Extra JSON-only payload (e.g. per-sector cluster detail).
    pub detail: Option<Value>,
}

impl Report {
    pub fn new(name: &str, header: &[&str]) -> Self {
        let mut provenance = Map::new();
        provenance.insert("tool".into(), json!(concat!("landau-lab ", env!("CARGO_PKG_VERSION"))));
        Report {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            provenance,
            detail: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.provenance.insert(key.into(), value);
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        Ok(w.into_inner()?)
    }

    pub fn to_json(&self) -> anyhow::Result<Vec<u8>> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.header
                        .iter()
                        .cloned()
                        .zip(r.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        let mut doc = json!({ "provenance": self.provenance, "rows": rows });
        if let Some(d) = &self.detail {
            doc["detail"] = d.clone();
        }
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Writes into `out/<name>.<ext>`, or to stdout when `out` is `None`.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
        let (bytes, ext) = match format {
            Format::Csv => (self.to_csv()?, "csv"),
            Format::Json => (self.to_json()?, "json"),
        };
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(format!("{}.{ext}", self.name));
                std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            }
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}
