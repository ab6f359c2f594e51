//! Plot-ready CSV: a `time_s` column followed by one column per signal,
//! every number printed with 9 significant digits.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Formats `x` with `digits` significant digits, like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders named, equal-length signals as CSV text.
pub fn render_csv(signals: &[(&str, &Signal)]) -> Result<String> {
    check(signals)?;
    let mut buf = Vec::new();
    write_csv_to(&mut buf, signals).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("ascii output"))
}

fn write_csv_to(out: &mut impl Write, signals: &[(&str, &Signal)]) -> std::io::Result<()> {
    write!(out, "time_s")?;
    for (name, _) in signals {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    let (_, first) = signals[0];
    let rate = first.sample_rate();
    for i in 0..first.len() {
        write!(out, "{}", format_significant(i as f64 / rate, 9))?;
        for (_, s) in signals {
            write!(out, ",{}", format_significant(s.samples()[i], 9))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn check(signals: &[(&str, &Signal)]) -> Result<()> {
    let (_, first) = signals.first().ok_or(Error::EmptyInput)?;
    for (_, s) in signals {
        if s.len() != first.len() {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                actual: s.len(),
            });
        }
        if s.sample_rate() != first.sample_rate() {
            return Err(Error::InconsistentSampleRate {
                expected: first.sample_rate(),
                actual: s.sample_rate(),
            });
        }
    }
    Ok(())
}

/// Writes `time_s,<name1>,<name2>,...` and one row per sample.
pub fn write_csv(path: impl AsRef<Path>, signals: &[(&str, &Signal)]) -> Result<()> {
    check(signals)?;
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv_to(&mut out, signals)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Parsed numeric CSV: header names and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let headers: Vec<String> = lines
            .next()
            .ok_or(Error::EmptyInput)?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != headers.len() {
                return Err(Error::MalformedCsv(format!(
                    "row {}: {} fields, expected {}",
                    row + 2,
                    fields.len(),
                    headers.len()
                )));
            }
            for (col, field) in columns.iter_mut().zip(fields) {
                let v = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::MalformedCsv(format!("row {}: bad number '{field}'", row + 2)))?;
                col.push(v);
            }
        }
        Ok(CsvTable { headers, columns })
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CsvTable::parse(&text)
}
