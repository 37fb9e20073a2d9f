//! Text ingestion and the binary cache format:
//! "ZTBL", u16 version, u16 flags, f64 base, u64 count, count × f64 offsets,
//! CRC32 of everything before it; all little-endian.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{TableSource, ZeroTable};
use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"ZTBL";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 8 + 8;

/// One decimal ordinate per line; '#' comments and blank lines skipped.
pub fn parse_zero_table(reader: impl BufRead, base: f64) -> Result<ZeroTable> {
    let mut ordinates = Vec::new();
    let mut last_value = f64::NEG_INFINITY;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: f64 =
            text.parse().map_err(|_| Error::Parse { line: line_no, message: format!("malformed decimal `{text}`") })?;
        if !value.is_finite() {
            return Err(Error::Parse { line: line_no, message: format!("non-finite value `{text}`") });
        }
        let ordinate = base + value;
        if !(ordinate > 0.0) {
            return Err(Error::Negativity { line: line_no });
        }
        if !(value > last_value) || ordinates.last().is_some_and(|&g| ordinate <= g) {
            return Err(Error::Monotonicity { line: line_no });
        }
        last_value = value;
        ordinates.push(ordinate);
    }
    // A table starting at the origin covers everything below its last entry;
    // an offset table only vouches for the span it lists.
    let t_min = if base == 0.0 { 0.0 } else { ordinates.first().copied().unwrap_or(base) };
    let t_max = ordinates.last().copied().unwrap_or(t_min);
    ZeroTable::new(ordinates, t_min, t_max, TableSource::Ingested)
}

fn choose_base(ordinates: &[f64], preferred: f64) -> f64 {
    let exact = ordinates.iter().all(|&g| preferred + (g - preferred) == g);
    if exact {
        preferred
    } else {
        0.0
    }
}

/// Serialize ordinates into the binary cache layout.
pub fn encode_binary(ordinates: &[f64], preferred_base: f64) -> Vec<u8> {
    let base = choose_base(ordinates, preferred_base);
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * ordinates.len() + 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&base.to_le_bytes());
    out.extend_from_slice(&(ordinates.len() as u64).to_le_bytes());
    for &g in ordinates {
        out.extend_from_slice(&(g - base).to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Inverse of [`encode_binary`]; verifies magic, version and checksum.
pub fn decode_binary(bytes: &[u8], path: &Path) -> Result<Vec<f64>> {
    let bad = |message: &str| Error::CacheFormat { path: path.to_path_buf(), message: message.to_string() };
    if bytes.len() < HEADER_LEN + 4 || bytes[..4] != MAGIC {
        return Err(bad("missing ZTBL header"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    let actual = crc32fast::hash(body);
    if stored != actual {
        return Err(Error::ChecksumMismatch {
            what: path.display().to_string(),
            expected: format!("{stored:08x}"),
            actual: format!("{actual:08x}"),
        });
    }
    let version = u16::from_le_bytes([body[4], body[5]]);
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let base = f64::from_le_bytes(body[8..16].try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(body[16..24].try_into().expect("8 bytes")) as usize;
    if body.len() != HEADER_LEN + 8 * count {
        return Err(bad("length does not match the stored count"));
    }
    Ok(body[HEADER_LEN..].chunks_exact(8).map(|c| base + f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_binary(ordinates: &[f64], base: f64, path: &Path) -> Result<()> {
    write_atomic(path, &encode_binary(ordinates, base))
}

pub fn read_binary(path: &Path) -> Result<Vec<f64>> {
    decode_binary(&fs::read(path)?, path)
}

/// Coverage and provenance stored next to a binary cache file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub t_min: f64,
    pub t_max: f64,
    pub zeros_below: u64,
    pub source: TableSource,
    pub certified_at: Option<f64>,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Binary cache plus a JSON sidecar (`<path>.json`) with coverage data.
pub fn write_table(table: &ZeroTable, path: &Path) -> Result<()> {
    if table.has_off_axis() || (0..table.len()).any(|i| table.multiplicity(i) != 1) {
        return Err(Error::CacheFormat {
            path: path.to_path_buf(),
            message: "the binary format stores on-axis simple zeros only".into(),
        });
    }
    let meta = TableMetadata {
        t_min: table.t_min(),
        t_max: table.t_max(),
        zeros_below: table.zeros_below(),
        source: table.source(),
        certified_at: table.certified_at(),
    };
    write_binary(table.ordinates(), table.t_min(), path)?;
    let json = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
    write_atomic(&sidecar(path), &json)
}

pub fn read_table(path: &Path) -> Result<ZeroTable> {
    let ordinates = read_binary(path)?;
    let meta_path = sidecar(path);
    let meta: TableMetadata = serde_json::from_slice(&fs::read(&meta_path)?)
        .map_err(|e| Error::CacheFormat { path: meta_path.clone(), message: e.to_string() })?;
    let mut table = ZeroTable::new(ordinates, meta.t_min, meta.t_max, meta.source)?.with_zeros_below(meta.zeros_below);
    if let Some(at) = meta.certified_at {
        table.mark_certified(at);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_and_offset() {
        let t = parse_zero_table("14.134725\n21.022040\n".as_bytes(), 0.0).unwrap();
        assert_eq!(t.len(), 2);
        let t = parse_zero_table("# header\n\n0.5\n1.25\n".as_bytes(), 1e6).unwrap();
        assert_eq!(t.ordinates(), &[1e6 + 0.5, 1e6 + 1.25]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_zero_table("21.0\n14.1\n".as_bytes(), 0.0), Err(Error::Monotonicity { line: 2 })));
        assert!(matches!(parse_zero_table("1.0\nabc\n".as_bytes(), 0.0), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_zero_table("-3.0\n".as_bytes(), 0.0), Err(Error::Negativity { line: 1 })));
    }

    #[test]
    fn header_layout() {
        let bytes = encode_binary(&[1.5, 2.5], 0.0);
        assert_eq!(&bytes[..4], &[0x5A, 0x54, 0x42, 0x4C]);
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(bytes.len(), HEADER_LEN + 16 + 4);
        let crc = crc32fast::hash(&bytes[..bytes.len() - 4]);
        assert_eq!(&bytes[bytes.len() - 4..], &crc.to_le_bytes());
    }

    #[test]
    fn flipped_byte_is_detected() {
        let mut bytes = encode_binary(&[14.1, 21.0, 25.0], 0.0);
        bytes[30] ^= 0x01;
        assert!(matches!(decode_binary(&bytes, Path::new("x")), Err(Error::ChecksumMismatch { .. })));
    }
}
