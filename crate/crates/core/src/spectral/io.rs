//! JSON/CSV exchange format for fields.
//!
//! A field is a pair: a JSON header holding the [`FrequencyGrid`] and a CSV
//! body with one row per mode, `n0,n1,n2,re,im` (unused index columns are 0).
//! Trace vectors and other field lists add a leading `k` column.

use super::{FrequencyGrid, SpectralField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

const MAX_DIM: usize = 3;

fn check_dim(grid: &FrequencyGrid) -> Result<()> {
    if grid.dim() > MAX_DIM {
        return Err(Error::Unsupported(format!("CSV field format supports up to {MAX_DIM} axes")));
    }
    Ok(())
}

fn row(out: &mut String, k: Option<usize>, mode: &[i64], c: Complex64) {
    if let Some(k) = k {
        let _ = write!(out, "{k},");
    }
    for a in 0..MAX_DIM {
        let _ = write!(out, "{},", mode.get(a).copied().unwrap_or(0));
    }
    let _ = writeln!(out, "{:e},{:e}", c.re, c.im);
}

pub fn field_to_csv(f: &SpectralField) -> Result<String> {
    check_dim(&f.grid)?;
    let mut out = String::from("n0,n1,n2,re,im\n");
    for (i, c) in f.coeffs.iter().enumerate() {
        row(&mut out, None, &f.grid.mode(i), *c);
    }
    Ok(out)
}

/// Several fields on one grid, distinguished by a leading `k` column.
pub fn fields_to_csv(fields: &[SpectralField]) -> Result<String> {
    let mut out = String::from("k,n0,n1,n2,re,im\n");
    for (k, f) in fields.iter().enumerate() {
        check_dim(&f.grid)?;
        for (i, c) in f.coeffs.iter().enumerate() {
            row(&mut out, Some(k), &f.grid.mode(i), *c);
        }
    }
    Ok(out)
}

fn parse_rows(text: &str, with_k: bool) -> Result<Vec<(usize, Vec<i64>, Complex64)>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let expect = if with_k { 6 } else { 5 };
        if cols.len() != expect {
            return Err(Error::Input(format!("line {}: expected {expect} columns", lineno + 1)));
        }
        let bad = |e: &dyn std::fmt::Display| Error::Input(format!("line {}: {e}", lineno + 1));
        let off = usize::from(with_k);
        let k = if with_k { cols[0].parse::<usize>().map_err(|e| bad(&e))? } else { 0 };
        let mode = cols[off..off + 3].iter().map(|c| c.parse::<i64>().map_err(|e| bad(&e))).collect::<Result<Vec<_>>>()?;
        let re = cols[off + 3].parse::<f64>().map_err(|e| bad(&e))?;
        let im = cols[off + 4].parse::<f64>().map_err(|e| bad(&e))?;
        rows.push((k, mode, Complex64::new(re, im)));
    }
    Ok(rows)
}

fn place(grid: &FrequencyGrid, f: &mut SpectralField, mode: &[i64], c: Complex64) -> Result<()> {
    let idx = grid
        .index_of(&mode[..grid.dim()])
        .filter(|_| mode[grid.dim()..].iter().all(|n| *n == 0))
        .ok_or_else(|| Error::Input(format!("mode {mode:?} outside grid {}", grid.summary())))?;
    f.coeffs[idx] = c;
    Ok(())
}

pub fn field_from_csv(grid: &FrequencyGrid, text: &str) -> Result<SpectralField> {
    check_dim(grid)?;
    let mut f = SpectralField::zeros(grid);
    for (_, mode, c) in parse_rows(text, false)? {
        place(grid, &mut f, &mode, c)?;
    }
    Ok(f)
}

pub fn fields_from_csv(grid: &FrequencyGrid, text: &str) -> Result<Vec<SpectralField>> {
    check_dim(grid)?;
    let mut out: Vec<SpectralField> = Vec::new();
    for (k, mode, c) in parse_rows(text, true)? {
        while out.len() <= k {
            out.push(SpectralField::zeros(grid));
        }
        place(grid, &mut out[k], &mode, c)?;
    }
    Ok(out)
}

/// Writes `<stem>.json` (grid) and `<stem>.csv` (coefficients).
pub fn write_field(stem: &Path, f: &SpectralField) -> Result<()> {
    std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&f.grid)?)?;
    std::fs::write(stem.with_extension("csv"), field_to_csv(f)?)?;
    Ok(())
}

pub fn read_field(stem: &Path) -> Result<SpectralField> {
    let grid: FrequencyGrid = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
    field_from_csv(&grid, &std::fs::read_to_string(stem.with_extension("csv"))?)
}
