//! Tabular experiment output and its CSV form.
//!
//! ```text
//! # key: value            metadata, one per line
//! m,closed_form,mc        header: axis name then column names
//! 1.6000000000000000e1,...
//! ```
//!
//! Reals are written with 17 significant digits so that a file re-parses to
//! the identical table.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    axis_name: String,
    axis: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
    metadata: Vec<(String, String)>,
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) || name.starts_with('#') {
        return Err(Error::InvalidArgument(format!("invalid column name {name:?}")));
    }
    Ok(())
}

impl SweepResult {
    pub fn new(axis_name: impl Into<String>, axis: Vec<f64>) -> Result<Self> {
        let axis_name = axis_name.into();
        check_name(&axis_name)?;
        Ok(SweepResult {
            axis_name,
            axis,
            columns: Vec::new(),
            metadata: Vec::new(),
        })
    }

    pub fn axis_name(&self) -> &str {
        &self.axis_name
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Appends a column; it must have one value per axis point and a new name.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        check_name(&name)?;
        if values.len() != self.axis.len() {
            return Err(Error::dims(
                format!("{} values for column {name}", self.axis.len()),
                values.len(),
            ));
        }
        if name == self.axis_name || self.columns.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidArgument(format!("duplicate column {name}")));
        }
        self.columns.push((name, values));
        Ok(())
    }

    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl ToString) -> Result<()> {
        let key = key.into();
        let value = value.to_string();
        if key.is_empty() || key.contains([':', '\n', '\r']) || value.contains(['\n', '\r']) {
            return Err(Error::InvalidArgument(format!("invalid metadata entry {key:?}")));
        }
        self.metadata.push((key, value));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        if name == self.axis_name {
            return Some(&self.axis);
        }
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header = vec![self.axis_name.as_str()];
        header.extend(self.column_names());
        w.write_record(&header)?;
        for (i, x) in self.axis.iter().enumerate() {
            let mut row = vec![format_real(*x)];
            row.extend(self.columns.iter().map(|(_, c)| format_real(c[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut body = String::new();
        let mut in_header = true;
        for line in input.lines() {
            let line = line?;
            if in_header {
                if let Some(rest) = line.strip_prefix('#') {
                    let rest = rest.strip_prefix(' ').unwrap_or(rest);
                    let (k, v) = rest
                        .split_once(": ")
                        .ok_or_else(|| Error::Parse(format!("bad metadata line {line:?}")))?;
                    metadata.push((k.to_string(), v.to_string()));
                    continue;
                }
                in_header = false;
            }
            body.push_str(&line);
            body.push('\n');
        }
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let header = reader.headers()?.clone();
        if header.is_empty() {
            return Err(Error::Parse("missing header row".into()));
        }
        let names: Vec<String> = header.iter().map(str::to_string).collect();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for record in reader.records() {
            let record = record?;
            for (i, field) in record.iter().enumerate() {
                let v = parse_real(field)?;
                cols[i].push(v);
            }
        }
        let mut it = names.into_iter().zip(cols);
        let (axis_name, axis) = it.next().expect("header is non-empty");
        let mut out = SweepResult::new(axis_name, axis)?;
        for (n, c) in it {
            out.push_column(n, c)?;
        }
        out.metadata = metadata;
        Ok(out)
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }
}

pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}
