//! CSV and JSON artifacts.
//!
//! Every float is written with 17 significant digits and a lowercase `e`
//! exponent so values survive a text round trip bit-for-bit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::jacobi::{DiscretizedMeasure, JacobiParams};
use crate::recover::RecoveredDensity;

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with floats in [`format_number`] form. Non-finite floats are
/// already mapped to `null` by the serializer.
struct ScientificFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ScientificFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_number(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        ScientificFormatter(PrettyFormatter::new()),
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Write a CSV with the given header and float rows. A column named `n` is
/// an index and written as an integer.
pub fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(header.iter().zip(row).map(|(&column, v)| {
            if column == "n" {
                (v as u64).to_string()
            } else {
                format_number(v)
            }
        }))?;
    }
    w.flush()?;
    Ok(())
}

fn write_rows_to(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    write_rows(BufWriter::new(File::create(path)?), header, rows)
}

pub fn write_measure_csv(path: &Path, mu: &DiscretizedMeasure) -> Result<()> {
    let rows = mu.points().iter().zip(mu.weights()).map(|(&x, &w)| vec![x, w]);
    write_rows_to(path, &["x", "w"], rows)
}

pub fn write_moments_csv(path: &Path, moments: &[f64]) -> Result<()> {
    write_rows_to(path, &["moment"], moments.iter().map(|&m| vec![m]))
}

pub fn write_jacobi_csv(path: &Path, params: &JacobiParams) -> Result<()> {
    let rows = params
        .alphas
        .iter()
        .zip(&params.betas)
        .enumerate()
        .map(|(n, (&a, &b))| vec![n as f64, a, b]);
    write_rows_to(path, &["n", "alpha", "beta"], rows)
}

pub fn write_density_csv(path: &Path, density: &RecoveredDensity) -> Result<()> {
    let rows = density.grid.iter().zip(&density.values).map(|(&x, &d)| vec![x, d]);
    write_rows_to(path, &["x", "density"], rows)
}

/// Contents of an input CSV, classified by its header.
#[derive(Clone, Debug, PartialEq)]
pub enum InputData {
    /// Single `moment` column.
    Moments(Vec<f64>),
    /// `x,w` columns.
    Measure(Vec<f64>, Vec<f64>),
}

pub fn read_input_csv(path: &Path) -> Result<InputData> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_ascii_lowercase).collect();
    let columns = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["moment"] => 1,
        ["x", "w"] => 2,
        other => {
            return Err(Error::InvalidArgument(format!(
                "{}: expected header `moment` or `x,w`, found `{}`",
                path.display(),
                other.join(",")
            )))
        }
    };
    let mut cols = vec![Vec::new(); columns];
    for (line, record) in r.records().enumerate() {
        let record = record?;
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "{}: row {} has non-numeric field `{field}`",
                    path.display(),
                    line + 1
                ))
            })?;
            cols[c].push(v);
        }
    }
    let mut cols = cols.into_iter();
    let first = cols.next().expect("at least one column");
    Ok(match cols.next() {
        None => InputData::Moments(first),
        Some(w) => InputData::Measure(first, w),
    })
}

pub fn read_measure_csv(path: &Path) -> Result<DiscretizedMeasure> {
    match read_input_csv(path)? {
        InputData::Measure(x, w) => DiscretizedMeasure::new(x, w),
        InputData::Moments(_) => Err(Error::InvalidArgument(format!(
            "{}: expected a measure CSV with header `x,w`",
            path.display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains('E'));
        }
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn json_uses_fixed_width_floats() {
        let s = to_json_string(&serde_json::json!({"a": [0.1, f64::NAN], "n": 3})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("null"));
        assert!(s.contains("\"n\": 3"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn input_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.csv");
        let mu = DiscretizedMeasure::new(vec![-1.0, 0.5, 2.0], vec![0.25, 0.5, 0.25]).unwrap();
        write_measure_csv(&path, &mu).unwrap();
        assert_eq!(read_measure_csv(&path).unwrap(), mu);
        let path = dir.path().join("m.csv");
        write_moments_csv(&path, &[1.0, 0.0, 1.0 / 3.0]).unwrap();
        assert_eq!(
            read_input_csv(&path).unwrap(),
            InputData::Moments(vec![1.0, 0.0, 1.0 / 3.0])
        );
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_input_csv(&path).is_err());
    }

    #[test]
    fn jacobi_csv_has_integer_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.csv");
        let p = JacobiParams { alphas: vec![0.0, 0.5], betas: vec![1.0, 2.0] };
        write_jacobi_csv(&path, &p).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,alpha,beta");
        assert!(lines[2].starts_with("1,5.0000000000000000e-1,"));
    }
}
