//! Flat output records rendered as text, JSON or CSV.
//!
//! Real numbers are rounded to 15 significant digits before they are written
//! in the machine-readable formats; non-finite values are written as the
//! strings `inf`, `-inf` and `nan`.

use std::io::{self, Write};

use serde::ser::{Serialize, SerializeMap, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Str(String),
    Null,
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Str(v)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Null, Into::into)
    }
}

/// Rounds to 15 significant digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Rounds to 6 significant digits for human-readable output.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn non_finite_label(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

impl Field {
    fn csv_cell(&self) -> String {
        match self {
            Field::Num(x) if x.is_finite() => round_sig15(*x).to_string(),
            Field::Num(x) => non_finite_label(*x).to_string(),
            Field::Int(i) => i.to_string(),
            Field::Str(s) => s.clone(),
            Field::Null => String::new(),
        }
    }

    pub fn text(&self) -> String {
        match self {
            Field::Num(x) if x.is_finite() => round_sig6(*x).to_string(),
            Field::Num(x) => non_finite_label(*x).to_string(),
            Field::Int(i) => i.to_string(),
            Field::Str(s) => s.clone(),
            Field::Null => "-".to_string(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(x) if x.is_finite() => s.serialize_f64(round_sig15(*x)),
            Field::Num(x) => s.serialize_str(non_finite_label(*x)),
            Field::Int(i) => s.serialize_u64(*i),
            Field::Str(v) => s.serialize_str(v),
            Field::Null => s.serialize_none(),
        }
    }
}

/// Ordered key/value record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Field>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn fields(&self) -> &[(&'static str, Field)] {
        &self.fields
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

pub fn write_json_record(out: &mut dyn Write, record: &Record) -> io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    writeln!(out)
}

pub fn write_json_table(out: &mut dyn Write, records: &[Record]) -> io::Result<()> {
    serde_json::to_writer(&mut *out, records)?;
    writeln!(out)
}

pub fn write_csv(out: &mut dyn Write, records: &[Record]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = records.first() {
        w.write_record(first.fields().iter().map(|(k, _)| *k))?;
    }
    for r in records {
        w.write_record(r.fields().iter().map(|(_, v)| v.csv_cell()))?;
    }
    w.flush()
}

/// `key: value` lines.
pub fn write_text_record(out: &mut dyn Write, record: &Record) -> io::Result<()> {
    let width = record
        .fields()
        .iter()
        .map(|(k, _)| k.len())
        .max()
        .unwrap_or(0);
    for (k, v) in record.fields() {
        writeln!(out, "{k:<width$}  {}", v.text())?;
    }
    Ok(())
}

pub fn write_text_table(out: &mut dyn Write, records: &[Record]) -> io::Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<&str> = first.fields().iter().map(|(k, _)| *k).collect();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| r.fields().iter().map(|(_, v)| v.text()).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|row| row[i].len())
                .chain(std::iter::once(header[i].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.clone()))?;
    for row in &rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
