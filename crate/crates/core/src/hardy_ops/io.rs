//! Dense matrix files: a binary format and CSV.
//!
//! Binary layout: 8-byte magic, `N` as little-endian `u64`, then `N * N`
//! complex128 entries in row-major order, each as two little-endian `f64`.

use std::io::{BufRead, BufReader, Read, Write};

use faer::Mat;

use super::Matrix;
use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: &[u8; 8] = b"HARDYMX1";

pub fn write_binary<W: Write>(m: &Matrix, mut w: W) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter("only square matrices are exported".into()));
    }
    let n = m.nrows();
    let mut buf = Vec::with_capacity(16 + 16 * n * n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            buf.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Matrix> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(|e| Error::Format(format!("short header: {e}")))?;
    if &header[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let n = u64::from_le_bytes(header[8..].try_into().unwrap()) as usize;
    if n > super::MAX_WORKING_SIZE {
        return Err(Error::TooLarge(n));
    }
    let mut body = vec![0u8; 16 * n * n];
    r.read_exact(&mut body).map_err(|e| Error::Format(format!("truncated body: {e}")))?;
    let f = |off: usize| f64::from_le_bytes(body[off..off + 8].try_into().unwrap());
    Ok(Mat::from_fn(n, n, |i, j| {
        let off = 16 * (i * n + j);
        C64::new(f(off), f(off + 8))
    }))
}

/// One matrix row per line as `re,im` pairs; an optional first line `# <comment>`.
pub fn write_csv<W: Write>(m: &Matrix, comment: Option<&str>, mut w: W) -> Result<()> {
    let mut out = String::new();
    if let Some(c) = comment {
        out.push_str("# ");
        out.push_str(&c.replace('\n', " "));
        out.push('\n');
    }
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).flat_map(|j| [m[(i, j)].re.to_string(), m[(i, j)].im.to_string()]).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Matrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Format(format!("{x}: {e}"))))
            .collect::<Result<_>>()?;
        if !vals.len().is_multiple_of(2) {
            return Err(Error::Format("odd number of fields in a row".into()));
        }
        rows.push(vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Format("matrix is not square".into()));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Mat::from_fn(5, 5, |i, j| C64::new((i as f64 + 0.1).ln() / 3.0, j as f64 * std::f64::consts::PI))
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let m = sample();
        let mut buf = Vec::new();
        write_binary(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * 25);
        let back = read_binary(buf.as_slice()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(back[(i, j)].re.to_bits(), m[(i, j)].re.to_bits());
                assert_eq!(back[(i, j)].im.to_bits(), m[(i, j)].im.to_bits());
            }
        }
        buf[0] = b'X';
        assert!(read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = sample();
        let mut buf = Vec::new();
        write_csv(&m, Some("example"), &mut buf).unwrap();
        assert!(buf.starts_with(b"# example\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(back[(i, j)], m[(i, j)]);
            }
        }
        assert!(read_csv("1,0,2\n".as_bytes()).is_err());
    }
}
