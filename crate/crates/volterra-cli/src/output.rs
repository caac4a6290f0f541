//! Byte-stable data emission: one shared float formatter, CSV and JSON
//! writers that use it for every number they print.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

/// Nine significant digits, scientific. One guard digit beyond the
/// eight-decimal comparison values; identical input bits produce identical
/// bytes on every run.
pub fn fmt9(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{x:.8e}")
}

/// Where data rows go; reports always go to standard error.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn writer(&self) -> io::Result<Box<dyn Write>> {
        match self {
            Sink::Stdout => Ok(Box::new(io::stdout().lock())),
            Sink::File(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
        }
    }
}

/// One `(t, u, y)` sample of an emitted series.
pub struct SeriesPoint {
    pub t: f64,
    pub u: f64,
    pub y: f64,
}

pub fn write_series_csv(out: &mut dyn Write, series: &[SeriesPoint]) -> io::Result<()> {
    writeln!(out, "t,u,y")?;
    for p in series {
        writeln!(out, "{},{},{}", fmt9(p.t), fmt9(p.u), fmt9(p.y))?;
    }
    Ok(())
}

/// Minimal JSON value tree; numbers keep the exact [`fmt9`] token so the
/// JSON sink carries the same digits as the CSV sink.
pub enum Json {
    Num(f64),
    Int(u64),
    Str(String),
    Bool(bool),
    Null,
    Arr(Vec<Json>),
    /// Ordered key-value pairs; order is part of the byte contract.
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        match self {
            Json::Num(x) => write!(out, "{}", fmt9(*x)),
            Json::Int(i) => write!(out, "{i}"),
            Json::Str(s) => write!(out, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            Json::Bool(b) => write!(out, "{b}"),
            Json::Null => write!(out, "null"),
            Json::Arr(items) => {
                write!(out, "[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(out, ",")?;
                    }
                    item.write(out)?;
                }
                write!(out, "]")
            }
            Json::Obj(fields) => {
                write!(out, "{{")?;
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(out, ",")?;
                    }
                    write!(out, "\"{key}\":")?;
                    value.write(out)?;
                }
                write!(out, "}}")
            }
        }
    }

    pub fn write_line(&self, out: &mut dyn Write) -> io::Result<()> {
        self.write(out)?;
        writeln!(out)
    }
}

pub fn series_json(series: &[SeriesPoint]) -> Json {
    Json::Arr(
        series
            .iter()
            .map(|p| {
                Json::Obj(vec![
                    ("t", Json::Num(p.t)),
                    ("u", Json::Num(p.u)),
                    ("y", Json::Num(p.y)),
                ])
            })
            .collect(),
    )
}
