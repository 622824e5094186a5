//! Density snapshots as binary PGM or full-precision CSV, plus the
//! convergence log.
//!
//! Both snapshot formats put row 0 at the top of the domain (image
//! convention), i.e. the highest grid row is written first.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    Pgm,
    Csv,
    #[default]
    Both,
}

impl SnapshotFormat {
    pub fn pgm(self) -> bool {
        matches!(self, SnapshotFormat::Pgm | SnapshotFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, SnapshotFormat::Csv | SnapshotFormat::Both)
    }
}

impl std::str::FromStr for SnapshotFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm" => Ok(SnapshotFormat::Pgm),
            "csv" => Ok(SnapshotFormat::Csv),
            "both" => Ok(SnapshotFormat::Both),
            other => Err(Error::Config(format!(
                "format: unknown snapshot format {other:?} (expected pgm, csv or both)"
            ))),
        }
    }
}

fn check_len(field: &[f64], nx: usize, ny: usize) -> Result<()> {
    if field.len() != nx * ny {
        return Err(Error::invalid(format!(
            "field has {} entries, expected {nx}x{ny}",
            field.len()
        )));
    }
    Ok(())
}

/// Grey level of each element, top row first.
pub fn pgm_pixels(field: &[f64], nx: usize, ny: usize, rho_min: f64, rho_max: f64) -> Result<Vec<u8>> {
    check_len(field, nx, ny)?;
    let range = rho_max - rho_min;
    let mut pixels = Vec::with_capacity(nx * ny);
    for row in (0..ny).rev() {
        for &rho in &field[row * nx..(row + 1) * nx] {
            let level = (255.0 * (rho - rho_min) / range).round().clamp(0.0, 255.0);
            pixels.push(level as u8);
        }
    }
    Ok(pixels)
}

pub fn encode_pgm(field: &[f64], nx: usize, ny: usize, rho_min: f64, rho_max: f64) -> Result<Vec<u8>> {
    let mut bytes = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    bytes.extend(pgm_pixels(field, nx, ny, rho_min, rho_max)?);
    Ok(bytes)
}

/// Parse a binary PGM written by [`encode_pgm`]: `(width, height, pixels)`.
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |why: &str| Error::invalid(format!("malformed PGM: {why}"));
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("not P5"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("header number"));
    let (w, h, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    // single whitespace byte separates header from payload
    let payload = &bytes[pos + 1..];
    if payload.len() != w * h {
        return Err(bad("payload size"));
    }
    Ok((w, h, payload.to_vec()))
}

pub fn encode_csv(field: &[f64], nx: usize, ny: usize) -> Result<String> {
    check_len(field, nx, ny)?;
    let mut out = String::with_capacity(field.len() * 8);
    for row in (0..ny).rev() {
        for (c, rho) in field[row * nx..(row + 1) * nx].iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            // shortest representation that round-trips
            write!(out, "{rho:?}").expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parse a CSV snapshot back into grid order: `(nx, ny, field)`.
pub fn decode_csv(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("malformed CSV value {v:?}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let ny = rows.len();
    let nx = rows.first().map_or(0, Vec::len);
    if nx == 0 || rows.iter().any(|r| r.len() != nx) {
        return Err(Error::invalid("CSV snapshot rows are ragged or empty"));
    }
    let field = rows.into_iter().rev().flatten().collect();
    Ok((nx, ny, field))
}

pub fn snapshot_stem(iteration: usize) -> String {
    format!("density_t{iteration}")
}

/// Write one snapshot in the requested format(s); returns the files written.
pub fn export_snapshot(
    dir: &Path,
    iteration: usize,
    field: &[f64],
    nx: usize,
    ny: usize,
    bounds: (f64, f64),
    format: SnapshotFormat,
) -> Result<Vec<PathBuf>> {
    let stem = snapshot_stem(iteration);
    let mut written = Vec::new();
    if format.pgm() {
        let path = dir.join(format!("{stem}.pgm"));
        let bytes = encode_pgm(field, nx, ny, bounds.0, bounds.1)?;
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    if format.csv() {
        let path = dir.join(format!("{stem}.csv"));
        fs::write(&path, encode_csv(field, nx, ny)?).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn convergence_csv(records: &[TraceRecord]) -> String {
    let mut out = String::from("iteration,total_cost,total_mass\n");
    for r in records {
        writeln!(out, "{},{:?},{:?}", r.iteration, r.total_cost, r.total_mass).expect("write to string");
    }
    out
}
