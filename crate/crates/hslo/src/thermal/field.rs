use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Magic bytes of the binary field format.
pub const FIELD_MAGIC: [u8; 4] = *b"HSLF";
/// Current binary field format version.
pub const FIELD_VERSION: u32 = 1;

/// Dense row-major scalar field on the node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

/// Node temperatures in kelvin.
pub type TemperatureField = ScalarField;
/// Volumetric heat intensity per node, W/m².
pub type IntensityField = ScalarField;

impl ScalarField {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarField {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} field needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(ScalarField { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.cols + col] = value;
    }

    /// Largest entry. Fields are never empty in this crate.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation onto a finer (or equal) node-centered grid
    /// spanning the same physical square.
    pub fn prolong_bilinear(&self, rows: usize, cols: usize) -> Result<ScalarField> {
        if self.rows < 2 || self.cols < 2 || rows < 2 || cols < 2 {
            return Err(Error::Dimension(
                "bilinear prolongation needs at least 2 nodes per side".into(),
            ));
        }
        let mut out = ScalarField::zeros(rows, cols);
        let rscale = (self.rows - 1) as f64 / (rows - 1) as f64;
        let cscale = (self.cols - 1) as f64 / (cols - 1) as f64;
        for i in 0..rows {
            let y = i as f64 * rscale;
            let i0 = (y.floor() as usize).min(self.rows - 2);
            let fy = y - i0 as f64;
            for j in 0..cols {
                let x = j as f64 * cscale;
                let j0 = (x.floor() as usize).min(self.cols - 2);
                let fx = x - j0 as f64;
                let v00 = self.get(i0, j0);
                let v01 = self.get(i0, j0 + 1);
                let v10 = self.get(i0 + 1, j0);
                let v11 = self.get(i0 + 1, j0 + 1);
                let v0 = v00 + fx * (v01 - v00);
                let v1 = v10 + fx * (v11 - v10);
                out.set(i, j, v0 + fy * (v1 - v0));
            }
        }
        Ok(out)
    }

    /// Writes the field as CSV, one row per line, 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for row in 0..self.rows {
            line.clear();
            for col in 0..self.cols {
                if col > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:.8e}", self.get(row, col)));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Parses a CSV field (rectangular, at least one value).
    pub fn read_csv<R: Read>(r: R) -> Result<ScalarField> {
        let mut text = String::new();
        let mut r = BufReader::new(r);
        r.read_to_string(&mut text)?;
        let mut values = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut count = 0;
            for part in line.split(',') {
                let v: f64 = part.trim().parse().map_err(|_| {
                    Error::Format(format!("line {}: bad number `{part}`", lineno + 1))
                })?;
                values.push(v);
                count += 1;
            }
            match cols {
                None => cols = Some(count),
                Some(c) if c != count => {
                    return Err(Error::Format(format!(
                        "line {}: expected {c} columns, got {count}",
                        lineno + 1
                    )))
                }
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::Format("empty field file".into()))?;
        ScalarField::from_values(rows, cols, values)
    }

    pub fn read_csv_path(path: &Path) -> Result<ScalarField> {
        Self::read_csv(File::open(path)?)
    }

    /// Writes the binary format: magic `HSLF`, u32 version, u32 rows,
    /// u32 cols, then row-major little-endian f64 values.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&FIELD_MAGIC)?;
        w.write_all(&FIELD_VERSION.to_le_bytes())?;
        w.write_all(&(self.rows as u32).to_le_bytes())?;
        w.write_all(&(self.cols as u32).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn write_binary_path(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<ScalarField> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated field: missing magic".into()))?;
        if magic != FIELD_MAGIC {
            return Err(Error::Format(format!(
                "bad field magic {magic:?}, expected {FIELD_MAGIC:?}"
            )));
        }
        let version = read_u32(r)?;
        if version != FIELD_VERSION {
            return Err(Error::Format(format!(
                "unsupported field version {version}, expected {FIELD_VERSION}"
            )));
        }
        let rows = read_u32(r)? as usize;
        let cols = read_u32(r)? as usize;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("field dimensions overflow".into()))?;
        let mut values = Vec::with_capacity(count);
        let mut buf = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut buf)
                .map_err(|_| Error::Format("truncated field values".into()))?;
            values.push(f64::from_le_bytes(buf));
        }
        ScalarField::from_values(rows, cols, values)
    }

    pub fn read_binary_path(path: &Path) -> Result<ScalarField> {
        Self::read_binary(&mut BufReader::new(File::open(path)?))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format("truncated field header".into()))?;
    Ok(u32::from_le_bytes(buf))
}
