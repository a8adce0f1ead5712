//! Points and queries files.
//!
//! Points: a `# k=<k> bound=<B>` header, then one `x1,...,xk` row per point.
//! Queries: one `lo1,hi1,...,lok,hik` row per window. In both, other lines
//! starting with `#` and blank lines are ignored.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use bits_kdtree::{Coord, QueryWindow};

use crate::BenchError;

#[derive(Clone, Debug, PartialEq)]
pub struct PointsFile {
    pub k: usize,
    pub bound: u64,
    /// Values as written; integers are exact.
    pub raw: Vec<Vec<f64>>,
}

pub fn read_to_string(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_points(text: &str, name: &str) -> Result<PointsFile, BenchError> {
    let (header_line, header) = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| BenchError::parse(name, 1, "missing `# k=<k> bound=<B>` header"))?;
    let line_no = header_line as u64 + 1;
    let (k, bound) = parse_header(header)
        .ok_or_else(|| BenchError::parse(name, line_no, "expected `# k=<k> bound=<B>` header"))?;
    if k == 0 {
        return Err(BenchError::parse(name, line_no, "k must be at least 1"));
    }
    if bound == 0 || bound > Coord::MAX as u64 + 1 {
        return Err(BenchError::parse(
            name,
            line_no,
            "bound must lie in 1..=2^32",
        ));
    }
    let raw = rows(text, name, |line, fields| {
        if fields.len() != k {
            return Err(BenchError::parse(
                name,
                line,
                format!("expected {k} coordinates, found {}", fields.len()),
            ));
        }
        Ok(fields)
    })?;
    Ok(PointsFile { k, bound, raw })
}

fn parse_header(line: &str) -> Option<(usize, u64)> {
    let rest = line.trim().strip_prefix('#')?;
    let mut k = None;
    let mut bound = None;
    for token in rest.split_whitespace() {
        match token.split_once('=')? {
            ("k", v) => k = Some(v.parse().ok()?),
            ("bound", v) => bound = Some(v.parse().ok()?),
            _ => return None,
        }
    }
    Some((k?, bound?))
}

pub fn parse_queries(text: &str, name: &str, k: usize) -> Result<Vec<Vec<(f64, f64)>>, BenchError> {
    rows(text, name, |line, fields| {
        if fields.len() != 2 * k {
            return Err(BenchError::parse(
                name,
                line,
                format!("expected {} bounds, found {}", 2 * k, fields.len()),
            ));
        }
        let ranges: Vec<(f64, f64)> = fields.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Some(d) = ranges.iter().position(|&(lo, hi)| lo > hi) {
            return Err(BenchError::parse(
                name,
                line,
                format!("dimension {}: lower bound above upper bound", d + 1),
            ));
        }
        Ok(ranges)
    })
}

fn rows<T>(
    text: &str,
    name: &str,
    mut row: impl FnMut(u64, Vec<f64>) -> Result<T, BenchError>,
) -> Result<Vec<T>, BenchError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = trimmed
            .split(',')
            .map(|f| match f.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(BenchError::parse(
                    name,
                    line,
                    format!("not a number: {:?}", f.trim()),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row(line, fields)?);
    }
    Ok(out)
}

pub fn write_points(
    mut w: impl Write,
    k: usize,
    bound: u64,
    points: &[Vec<Coord>],
) -> io::Result<()> {
    writeln!(w, "# k={k} bound={bound}")?;
    let mut wtr = csv::Writer::from_writer(w);
    for p in points {
        wtr.write_record(p.iter().map(|c| c.to_string()))?;
    }
    wtr.flush()
}

pub fn write_queries(w: impl Write, windows: &[QueryWindow]) -> io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(w);
    for q in windows {
        wtr.write_record(
            q.ranges()
                .iter()
                .flat_map(|&(lo, hi)| [lo.to_string(), hi.to_string()]),
        )?;
    }
    wtr.flush()
}
