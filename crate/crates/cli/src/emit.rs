//! Rendering of command results as text, JSON or CSV.

use std::io::{self, Write};

use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Header and records for CSV output.
pub type Table = (Vec<String>, Vec<Vec<String>>);

/// One result in all three renderings.
pub struct Output {
    pub json: Value,
    pub csv: Table,
    pub text: String,
}

/// Big integers travel as decimal strings.
pub fn big(x: &BigUint) -> String {
    x.to_string()
}

/// Rationals travel as `{"num": "...", "den": "..."}` in lowest terms.
pub fn rational(q: &BigRational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

pub fn table<H: Into<String>>(header: Vec<H>, rows: Vec<Vec<String>>) -> Table {
    (header.into_iter().map(Into::into).collect(), rows)
}

impl Output {
    pub fn write(self, format: Format, metadata: Value) -> io::Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Text => out.write_all(self.text.as_bytes())?,
            Format::Json => {
                let mut json = self.json;
                json["metadata"] = metadata;
                serde_json::to_writer_pretty(&mut out, &json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&self.csv.0)?;
                for row in &self.csv.1 {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        out.flush()
    }
}
