//! CSV tables: header row, LF line endings, reals to 12 significant digits.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Real(f64),
    Int(i64),
    Empty,
}

impl Field {
    pub fn render(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Real(x) => format_real(*x),
            Field::Int(i) => i.to_string(),
            Field::Empty => String::new(),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Field {
        Field::Real(x)
    }
}

impl From<i64> for Field {
    fn from(x: i64) -> Field {
        Field::Int(x)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Field {
        Field::Text(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Field {
        Field::Text(s)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(x: Option<T>) -> Field {
        x.map_or(Field::Empty, Into::into)
    }
}

/// `%.12g`-style formatting.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, x);
        trim_zeros(&s).to_string()
    } else {
        let s = format!("{:.11e}", x);
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_zeros(mantissa), e)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Field::render))?;
        }
        out.flush().map_err(|e| CliError::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Index of a header column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    table.write(std::io::BufWriter::new(file))
}

/// Header and raw string records of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
