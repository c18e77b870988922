//! Binary dump of energy matrices: a 16-byte header (`b"CAPM"`, version
//! `u32`, `N` as `u64`, all little-endian) followed by `N²` row-major `f64`.

use std::io::{Read, Write};
use std::path::Path;

use super::EnergyMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"CAPM";
const VERSION: u32 = 1;

pub fn write_matrix_dump<T: Real>(a: &EnergyMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(MAGIC)?;
    f.write_all(&VERSION.to_le_bytes())?;
    f.write_all(&(a.n() as u64).to_le_bytes())?;
    for x in a.entries() {
        f.write_all(&x.to_f64_lossy().to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

/// Returns `N` and the row-major entries.
pub fn read_matrix_dump(path: impl AsRef<Path>) -> Result<(usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Error::InvalidArgument("not a CAPM matrix dump".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::InvalidArgument(format!("unsupported CAPM version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[16..];
    if body.len() != n * n * 8 {
        return Err(Error::InvalidArgument(format!("CAPM body holds {} bytes, expected {}", body.len(), n * n * 8)));
    }
    let entries = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((n, entries))
}
