//! Grid files: the binary `SPTG` format and a CSV alternative.
//!
//! `SPTG`: magic bytes `SPTG`, `u32` version 1, `u32` rank, `rank` `u32`
//! dimensions, then the values as row-major little-endian `f64`. CSV: a
//! header `# dims=d1,d2,…` followed by one value per line.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Result, SptError};
use crate::field::BasicFunction;
use crate::geometry::SasakiModel;

const MAGIC: &[u8; 4] = b"SPTG";
const VERSION: u32 = 1;

/// Shape and values of a grid file, independent of any model.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGrid {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl RawGrid {
    fn checked(dims: Vec<usize>, values: Vec<f64>) -> Result<RawGrid> {
        let expect: usize = dims.iter().product();
        if dims.is_empty() || expect != values.len() {
            return Err(SptError::Format(format!("dims {dims:?} do not match {} values", values.len())));
        }
        Ok(RawGrid { dims, values })
    }

    /// Attach to a model whose file shape matches.
    pub fn into_function(self, model: &Arc<SasakiModel>) -> Result<BasicFunction> {
        if self.dims != model.file_dims() {
            return Err(SptError::Format(format!("file dims {:?}, model expects {:?}", self.dims, model.file_dims())));
        }
        BasicFunction::new(model, self.values)
    }
}

/// Encode values in the binary format.
pub fn encode_sptg(dims: &[usize], values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * dims.len() + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize) -> Result<&'a [u8]> {
    let end = at.checked_add(n).filter(|&e| e <= bytes.len()).ok_or_else(|| SptError::Format("truncated file".into()))?;
    let s = &bytes[*at..end];
    *at = end;
    Ok(s)
}

fn read_u32(bytes: &[u8], at: &mut usize) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, at, 4)?.try_into().expect("4 bytes")))
}

/// Decode the binary format.
pub fn decode_sptg(bytes: &[u8]) -> Result<RawGrid> {
    let mut at = 0;
    if take(bytes, &mut at, 4)? != MAGIC {
        return Err(SptError::Format("bad magic".into()));
    }
    let version = read_u32(bytes, &mut at)?;
    if version != VERSION {
        return Err(SptError::Format(format!("unsupported version {version}")));
    }
    let rank = read_u32(bytes, &mut at)? as usize;
    if rank == 0 || rank > 16 {
        return Err(SptError::Format(format!("implausible rank {rank}")));
    }
    let dims = (0..rank).map(|_| read_u32(bytes, &mut at).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let count: usize = dims.iter().product();
    let body = take(bytes, &mut at, count.checked_mul(8).ok_or_else(|| SptError::Format("size overflow".into()))?)?;
    if at != bytes.len() {
        return Err(SptError::Format("trailing bytes".into()));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    RawGrid::checked(dims, values)
}

/// Encode values as CSV with a dimension header.
pub fn encode_csv(dims: &[usize], values: &[f64]) -> String {
    let mut s = String::with_capacity(24 * values.len() + 32);
    let header: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    s.push_str("# dims=");
    s.push_str(&header.join(","));
    s.push('\n');
    for v in values {
        // Shortest representation that round-trips exactly.
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

/// Decode the CSV format.
pub fn decode_csv(text: &str) -> Result<RawGrid> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| SptError::Format("empty file".into()))?;
    let dims_text = header.trim().strip_prefix("# dims=").ok_or_else(|| SptError::Format("missing dims header".into()))?;
    let dims = dims_text
        .split(',')
        .map(|d| d.trim().parse::<usize>().map_err(|e| SptError::Format(format!("bad dimension {d:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|e| SptError::Format(format!("bad value {l:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    RawGrid::checked(dims, values)
}

/// Whether a path names a CSV file (by extension).
fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Write a basic function; `.csv` paths use CSV, anything else `SPTG`.
pub fn write_grid(path: &Path, u: &BasicFunction) -> Result<()> {
    let dims = u.model().file_dims();
    let mut f = std::fs::File::create(path)?;
    if is_csv(path) {
        f.write_all(encode_csv(&dims, u.values()).as_bytes())?;
    } else {
        f.write_all(&encode_sptg(&dims, u.values()))?;
    }
    Ok(())
}

/// Read a grid file without a model.
pub fn read_raw(path: &Path) -> Result<RawGrid> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        decode_sptg(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| SptError::Format("neither SPTG nor UTF-8 CSV".into()))?;
        decode_csv(&text)
    }
}

/// Read a grid file as a basic function on `model`.
pub fn read_grid(path: &Path, model: &Arc<SasakiModel>) -> Result<BasicFunction> {
    read_raw(path)?.into_function(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let b = encode_sptg(&[2, 3], &[0.0; 6]);
        assert_eq!(&b[..4], b"SPTG");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        assert_eq!(b.len(), 12 + 8 + 48);
    }

    #[test]
    fn truncated_rejected() {
        let b = encode_sptg(&[2, 2], &[1.0; 4]);
        assert!(decode_sptg(&b[..b.len() - 1]).is_err());
        assert!(decode_csv("# dims=2\n1\n").is_err());
    }
}
