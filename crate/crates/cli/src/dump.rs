//! Dense matrix dumps. CSV files carry their provenance in a leading comment;
//! binary files get a JSON sidecar next to them (`<file>.json`).
//!
//! Binary layout: the 8 bytes `HRDYMAT1`, rows and columns as little-endian
//! `u64`, then row-major `(re, im)` pairs of little-endian `f64`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use faer::Mat;
use hardy_core::hardy_ops::{evaluate, Matrix};
use hardy_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::TOOL;
use crate::spec::OpSpec;

const MAGIC: &[u8; 8] = b"HRDYMAT1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DumpFormat {
    Csv,
    Bin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub op: String,
    pub expr: String,
    pub size: usize,
    pub working_factor: usize,
}

/// Leading `size x size` block of the operator, evaluated at `factor * size` basis functions.
pub fn materialize(op: &OpSpec, size: usize, factor: usize) -> Result<(Matrix, Provenance)> {
    if size == 0 {
        return Err(Error::Config("size must be positive".into()));
    }
    let expr = op.build(size * factor)?;
    let t = evaluate(&expr, size, factor)?;
    let prov = Provenance { tool: TOOL.to_string(), op: op.to_string(), expr: expr.to_string(), size, working_factor: factor };
    Ok((t.matrix, prov))
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write(path: &Path, m: &Matrix, prov: &Provenance, format: DumpFormat) -> Result<()> {
    match format {
        DumpFormat::Csv => std::fs::write(path, to_csv(m, prov)).map_err(Error::io(path)),
        DumpFormat::Bin => {
            std::fs::write(path, to_bin(m)).map_err(Error::io(path))?;
            let side = sidecar(path);
            let mut text = serde_json::to_string_pretty(prov).expect("provenance serializes");
            text.push('\n');
            std::fs::write(&side, text).map_err(Error::io(&side))
        }
    }
}

pub fn to_csv(m: &Matrix, prov: &Provenance) -> String {
    let mut out = format!(
        "# {}; op {}; expr {}; size {}; working_factor {}\nrow,col,re,im\n",
        prov.tool, prov.op, prov.expr, prov.size, prov.working_factor
    );
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{i},{j},{:e},{:e}", z.re, z.im);
        }
    }
    out
}

pub fn read_csv(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let bad = |msg: String| Error::Config(format!("{}: {msg}", path.display()));
    let mut entries = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("row,")) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(format!("bad row '{line}'")));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad index '{s}'")));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number '{s}'")));
        entries.push((idx(f[0])?, idx(f[1])?, C64::new(num(f[2])?, num(f[3])?)));
    }
    let rows = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let cols = entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
    if entries.len() != rows * cols {
        return Err(bad(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
    }
    let mut m = Mat::zeros(rows, cols);
    for (i, j, z) in entries {
        m[(i, j)] = z;
    }
    Ok(m)
}

pub fn to_bin(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * m.nrows() * m.ncols());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

pub fn from_bin(bytes: &[u8]) -> Result<Matrix> {
    let bad = |msg: &str| Error::Config(format!("binary matrix: {msg}"));
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(bad("missing header"));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let (rows, cols) = (word(8) as usize, word(16) as usize);
    if rows.checked_mul(cols).and_then(|n| n.checked_mul(16)) != Some(bytes.len() - 24) {
        return Err(bad("length does not match the header"));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    Ok(Mat::from_fn(rows, cols, |i, j| {
        let k = 24 + 16 * (i * cols + j);
        C64::new(f(k), f(k + 8))
    }))
}

pub fn read_bin(path: &Path) -> Result<Matrix> {
    from_bin(&std::fs::read(path).map_err(Error::io(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Mat::from_fn(3, 2, |i, j| C64::new(i as f64 / 3.0, -(j as f64) * 1e-300))
    }

    #[test]
    fn bin_round_trip_is_bitwise() {
        let m = sample();
        let back = from_bin(&to_bin(&m)).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(m[(i, j)].re.to_bits(), back[(i, j)].re.to_bits());
                assert_eq!(m[(i, j)].im.to_bits(), back[(i, j)].im.to_bits());
            }
        }
    }

    #[test]
    fn truncated_bin_rejected() {
        let bytes = to_bin(&sample());
        assert!(from_bin(&bytes[..bytes.len() - 1]).is_err());
        assert!(from_bin(b"nonsense").is_err());
    }

    #[test]
    fn shift_dump() {
        let (m, prov) = materialize(&"T[power 1]".parse().unwrap(), 4, 4).unwrap();
        assert_eq!(prov.op, "T[power 1]");
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j + 1 { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - want).norm() < 1e-12);
            }
        }
        assert!(to_csv(&m, &prov).starts_with("# hardy-verify"));
    }
}
