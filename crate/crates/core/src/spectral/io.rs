//! Binary coefficient files.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content                                        |
//! |--------|------|------------------------------------------------|
//! | 0      | 4    | magic `GLSF`                                   |
//! | 4      | 2    | format version, currently 1                    |
//! | 6      | 2    | endianness tag `0xFEFF` (bytes `FF FE`)        |
//! | 8      | 8    | resolution `n`                                 |
//! | 16     | 1    | truncation shape: 0 square, 1 ball             |
//! | 17     | 7    | reserved, zero                                 |
//! | 24     | 8    | ball bound `Λ` (0 for square)                  |
//! | 32     | 8    | coefficient count `(h+1)(2h+1)`                |
//! | 40     | 16·N | `(re, im)` pairs as `f64`                      |
//!
//! Coefficients follow the half-plane order of [`WaveGrid::index`]: rows
//! `k2 = 0..=h`, each row `k1 = -h..=h`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex;

use super::field::SpectralField;
use super::grid::{Truncation, WaveGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: [u8; 4] = *b"GLSF";
pub const VERSION: u16 = 1;
const ENDIAN_TAG: u16 = 0xFEFF;
const HEADER_LEN: usize = 40;

pub fn encode<T: Real>(field: &SpectralField<T>) -> Vec<u8> {
    let grid = field.grid();
    let (shape, bound) = match grid.truncation() {
        Truncation::Square => (0u8, 0u64),
        Truncation::Ball { lambda_max } => (1u8, lambda_max),
    };
    let coeffs = field.storage();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * coeffs.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&ENDIAN_TAG.to_le_bytes());
    out.extend_from_slice(&(grid.resolution() as u64).to_le_bytes());
    out.push(shape);
    out.extend_from_slice(&[0u8; 7]);
    out.extend_from_slice(&bound.to_le_bytes());
    out.extend_from_slice(&(coeffs.len() as u64).to_le_bytes());
    for c in coeffs {
        out.extend_from_slice(&c.re.to_f64_lossy().to_le_bytes());
        out.extend_from_slice(&c.im.to_f64_lossy().to_le_bytes());
    }
    out
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

/// Decode a coefficient file; `origin` only labels errors.
pub fn decode<T: Real>(bytes: &[u8], origin: &Path) -> Result<SpectralField<T>> {
    let bad = |reason: String| Error::Format {
        path: origin.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("file is {} bytes, shorter than the header", bytes.len())));
    }
    if bytes[0..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    if u16::from_le_bytes([bytes[6], bytes[7]]) != ENDIAN_TAG {
        return Err(bad("endianness tag mismatch".into()));
    }
    let resolution = u64_at(bytes, 8) as usize;
    let truncation = match bytes[16] {
        0 => Truncation::Square,
        1 => Truncation::Ball {
            lambda_max: u64_at(bytes, 24),
        },
        s => return Err(bad(format!("unknown truncation shape {s}"))),
    };
    let grid = WaveGrid::new(resolution, truncation).map_err(|e| bad(e.to_string()))?;
    let count = u64_at(bytes, 32) as usize;
    if count != grid.storage_len() {
        return Err(bad(format!("count {count} does not match {grid}")));
    }
    if bytes.len() != HEADER_LEN + 16 * count {
        return Err(bad(format!("expected {} bytes, found {}", HEADER_LEN + 16 * count, bytes.len())));
    }
    let mut coeffs = Vec::with_capacity(count);
    for i in 0..count {
        let at = HEADER_LEN + 16 * i;
        let (re, im) = (f64_at(bytes, at), f64_at(bytes, at + 8));
        if !re.is_finite() || !im.is_finite() {
            return Err(bad(format!("non-finite coefficient at index {i}")));
        }
        coeffs.push(Complex::new(T::lit(re), T::lit(im)));
    }
    SpectralField::from_storage(grid, coeffs)
}

pub fn write_field<T: Real>(path: &Path, field: &SpectralField<T>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode(field))?;
    file.sync_all()?;
    Ok(())
}

pub fn read_field<T: Real>(path: &Path) -> Result<SpectralField<T>> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingArtifact(path.display().to_string()),
        _ => Error::Io(e),
    })?;
    decode(&bytes, path)
}
