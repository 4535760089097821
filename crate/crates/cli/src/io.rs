//! Matrix file parsing and CSV emission.
//!
//! Matrix format: a header line `rows cols complex|real` followed by
//! whitespace-separated entries in row-major order; complex entries
//! interleave real and imaginary parts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use lyapdecay::densela::{cplx, CMat};

pub fn read_matrix(path: &Path) -> Result<CMat> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut tokens = text.split_whitespace();
    let rows: usize = tokens
        .next()
        .context("missing row count")?
        .parse()
        .context("bad row count")?;
    let cols: usize = tokens
        .next()
        .context("missing column count")?
        .parse()
        .context("bad column count")?;
    let kind = tokens.next().context("missing real|complex marker")?;
    let complex = match kind {
        "complex" => true,
        "real" => false,
        other => bail!("expected 'real' or 'complex', got '{other}'"),
    };
    let mut values = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = tokens
            .next()
            .context("matrix file ended early")?
            .parse()
            .context("bad entry")?;
        let im: f64 = if complex {
            tokens
                .next()
                .context("matrix file ended early")?
                .parse()
                .context("bad entry")?
        } else {
            0.0
        };
        values.push(cplx(re, im));
    }
    if tokens.next().is_some() {
        bail!("trailing data after {rows}x{cols} entries");
    }
    Ok(CMat::from_row_slice(rows, cols, &values))
}

/// CSV table builder: timestamp comment, header row, then rows of values
/// printed with 17 significant digits so doubles round-trip.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut buf = format!("# generated at unix time {stamp}\n");
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: &[CsvCell]) {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                CsvCell::Int(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                CsvCell::Num(v) => {
                    let _ = write!(self.buf, "{v:.16e}");
                }
                CsvCell::Text(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, self.buf).with_context(|| format!("writing {}", path.display()))
    }
}

pub enum CsvCell {
    Int(i64),
    Num(f64),
    Text(String),
}

pub fn int(v: usize) -> CsvCell {
    CsvCell::Int(v as i64)
}

pub fn num(v: f64) -> CsvCell {
    CsvCell::Num(v)
}

pub fn text(s: impl Into<String>) -> CsvCell {
    CsvCell::Text(s.into())
}
