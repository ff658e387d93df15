//! `ANS2` binary snapshots: magic, `u32 n1`, `u32 n2`, `f64 time`, then
//! `2·n1·n2` little-endian `f64` samples (component 1 then component 2,
//! x₁ index slow).

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::spectral::fft::{forward_transform, inverse_transform};
use crate::spectral::{PhysicalField, SpectralField, TorusGrid};

pub const MAGIC: &[u8; 4] = b"ANS2";
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("bad magic {found:?} at offset 0")]
    BadMagic { found: Vec<u8> },
    #[error("file truncated at offset {offset}: expected {expected} bytes")]
    Truncated { offset: usize, expected: usize },
    #[error("invalid grid {n1}x{n2} in header at offset {offset}")]
    BadGrid { offset: usize, n1: u32, n2: u32 },
    #[error("non-finite value at offset {offset}")]
    NonFinite { offset: usize },
    #[error("{extra} unexpected trailing bytes at offset {offset}")]
    Trailing { offset: usize, extra: usize },
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
}

impl SnapshotError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::BadMagic { .. } => "bad_magic",
            Self::Truncated { .. } => "truncated",
            Self::BadGrid { .. } => "bad_grid",
            Self::NonFinite { .. } => "non_finite",
            Self::Trailing { .. } => "trailing_bytes",
            Self::Io(_) => "io",
        }
    }

    /// Byte offset of the defect, when one applies.
    pub fn offset(&self) -> Option<usize> {
        match self {
            Self::BadMagic { .. } => Some(0),
            Self::Truncated { offset, .. }
            | Self::BadGrid { offset, .. }
            | Self::NonFinite { offset }
            | Self::Trailing { offset, .. } => Some(*offset),
            Self::Io(_) => None,
        }
    }
}

/// Serializes physical samples and a time stamp.
pub fn encode(field: &PhysicalField, time: f64) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n1() as u32).to_le_bytes());
    out.extend_from_slice(&(g.n2() as u32).to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for j in 0..2 {
        for v in field.component(j) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn read_f64(bytes: &[u8], offset: usize) -> Result<f64, SnapshotError> {
    let b = bytes
        .get(offset..offset + 8)
        .ok_or(SnapshotError::Truncated { offset: bytes.len(), expected: offset + 8 })?;
    Ok(f64::from_le_bytes(b.try_into().expect("eight bytes")))
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, SnapshotError> {
    let b = bytes
        .get(offset..offset + 4)
        .ok_or(SnapshotError::Truncated { offset: bytes.len(), expected: offset + 4 })?;
    Ok(u32::from_le_bytes(b.try_into().expect("four bytes")))
}

/// Parses and validates an `ANS2` buffer.
pub fn decode(bytes: &[u8]) -> Result<(PhysicalField, f64), SnapshotError> {
    let magic = bytes.get(..4).unwrap_or(bytes);
    if magic != MAGIC {
        if magic.len() < 4 && MAGIC.starts_with(magic) {
            return Err(SnapshotError::Truncated { offset: bytes.len(), expected: HEADER_LEN });
        }
        return Err(SnapshotError::BadMagic { found: magic.to_vec() });
    }
    let n1 = read_u32(bytes, 4)?;
    let n2 = read_u32(bytes, 8)?;
    let grid = TorusGrid::new(n1 as usize, n2 as usize)
        .map_err(|_| SnapshotError::BadGrid { offset: 4, n1, n2 })?;
    let time = read_f64(bytes, 12)?;
    if !time.is_finite() {
        return Err(SnapshotError::NonFinite { offset: 12 });
    }
    let n = grid.len();
    let expected = HEADER_LEN + 16 * n;
    if bytes.len() < expected {
        return Err(SnapshotError::Truncated { offset: bytes.len(), expected });
    }
    if bytes.len() > expected {
        return Err(SnapshotError::Trailing { offset: expected, extra: bytes.len() - expected });
    }
    let mut comps = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (j, comp) in comps.iter_mut().enumerate() {
        for i in 0..n {
            let offset = HEADER_LEN + 8 * (j * n + i);
            let v = read_f64(bytes, offset)?;
            if !v.is_finite() {
                return Err(SnapshotError::NonFinite { offset });
            }
            comp.push(v);
        }
    }
    let [a, b] = comps;
    let field = PhysicalField::from_components(grid, a, b).expect("sample counts checked");
    Ok((field, time))
}

pub fn write_physical(field: &PhysicalField, time: f64, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
    fs::write(path, encode(field, time))?;
    Ok(())
}

pub fn read_physical(path: impl AsRef<Path>) -> Result<(PhysicalField, f64), SnapshotError> {
    decode(&fs::read(path)?)
}

/// Writes the physical samples of a spectral field.
pub fn write_snapshot(field: &SpectralField, time: f64, path: impl AsRef<Path>) -> crate::Result<()> {
    let phys = inverse_transform(field)?;
    write_physical(&phys, time, path)?;
    Ok(())
}

/// Reads a snapshot back into Fourier coefficients.
pub fn read_snapshot(path: impl AsRef<Path>) -> crate::Result<(SpectralField, f64)> {
    let (phys, time) = read_physical(path)?;
    Ok((forward_transform(&phys), time))
}
