//! Downloading published zero tables into a local cache.
//!
//! Cache layout for a source `id`: `<id>.txt` raw bytes, `<id>.sha256` digest,
//! `<id>.ztbl` binary table with its `<id>.ztbl.json` sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::io::{parse_zero_table, read_table, write_atomic, write_table};
use super::ZeroTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub url: String,
    /// Expected SHA-256 of the raw bytes. When absent the first download is trusted
    /// and its digest recorded for later checks.
    #[serde(default)]
    pub sha256: Option<String>,
    #[serde(default)]
    pub base: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceRegistry {
    entries: BTreeMap<String, SourceEntry>,
}

impl SourceRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The first 100,000 zeros from Odlyzko's public tables.
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        reg.insert(
            "odlyzko-zeros1",
            SourceEntry {
                url: "https://www-users.cse.umn.edu/~odlyzko/zeta_tables/zeros1".into(),
                sha256: None,
                base: 0.0,
            },
        );
        reg
    }

    pub fn insert(&mut self, id: &str, entry: SourceEntry) {
        self.entries.insert(id.to_string(), entry);
    }

    pub fn get(&self, id: &str) -> Result<&SourceEntry> {
        self.entries.get(id).ok_or_else(|| Error::UnknownSource(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

struct CachePaths {
    raw: PathBuf,
    digest: PathBuf,
    binary: PathBuf,
}

fn cache_paths(cache_dir: &Path, id: &str) -> CachePaths {
    CachePaths {
        raw: cache_dir.join(format!("{id}.txt")),
        digest: cache_dir.join(format!("{id}.sha256")),
        binary: cache_dir.join(format!("{id}.ztbl")),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn download(url: &str) -> Result<Vec<u8>> {
    let net = |message: String| Error::Network { url: url.to_string(), message };
    let agent = ureq::AgentBuilder::new()
        .timeout_connect(Duration::from_secs(20))
        .timeout(Duration::from_secs(600))
        .redirects(8)
        .build();
    let response = agent.get(url).call().map_err(|e| net(e.to_string()))?;
    let mut bytes = Vec::new();
    response.into_reader().read_to_end(&mut bytes).map_err(|e| net(e.to_string()))?;
    Ok(bytes)
}

fn expected_digest(entry: &SourceEntry, paths: &CachePaths) -> Result<Option<String>> {
    if let Some(d) = &entry.sha256 {
        return Ok(Some(d.to_ascii_lowercase()));
    }
    if paths.digest.exists() {
        return Ok(Some(fs::read_to_string(&paths.digest)?.trim().to_ascii_lowercase()));
    }
    Ok(None)
}

fn check_digest(what: &Path, bytes: &[u8], expected: Option<&str>) -> Result<String> {
    let actual = sha256_hex(bytes);
    match expected {
        Some(e) if e != actual => {
            Err(Error::ChecksumMismatch { what: what.display().to_string(), expected: e.to_string(), actual })
        }
        _ => Ok(actual),
    }
}

/// Return the table for `id`, downloading it only when the cache is cold.
pub fn fetch_zero_table(registry: &SourceRegistry, id: &str, cache_dir: &Path) -> Result<ZeroTable> {
    let entry = registry.get(id)?;
    let paths = cache_paths(cache_dir, id);
    let expected = expected_digest(entry, &paths)?;

    let raw = if paths.raw.exists() {
        let bytes = fs::read(&paths.raw)?;
        check_digest(&paths.raw, &bytes, expected.as_deref())?;
        if paths.binary.exists() {
            return read_table(&paths.binary);
        }
        bytes
    } else {
        let bytes = download(&entry.url)?;
        let digest = check_digest(Path::new(&entry.url), &bytes, expected.as_deref())?;
        write_atomic(&paths.raw, &bytes)?;
        write_atomic(&paths.digest, format!("{digest}\n").as_bytes())?;
        bytes
    };
    let table = parse_zero_table(raw.as_slice(), entry.base)?;
    write_table(&table, &paths.binary)?;
    Ok(table)
}

/// Re-check a populated cache: raw digest, binary checksum, and agreement of the
/// binary ordinates with a fresh parse of the raw text.
pub fn verify_cached_source(registry: &SourceRegistry, id: &str, cache_dir: &Path) -> Result<usize> {
    let entry = registry.get(id)?;
    let paths = cache_paths(cache_dir, id);
    let bytes = fs::read(&paths.raw)?;
    let expected = expected_digest(entry, &paths)?;
    check_digest(&paths.raw, &bytes, expected.as_deref())?;
    let cached = read_table(&paths.binary)?;
    let parsed = parse_zero_table(bytes.as_slice(), entry.base)?;
    let same = cached.len() == parsed.len()
        && cached.ordinates().iter().zip(parsed.ordinates()).all(|(a, b)| a.to_bits() == b.to_bits());
    if !same {
        return Err(Error::CacheFormat {
            path: paths.binary,
            message: "binary table disagrees with the raw source".into(),
        });
    }
    Ok(cached.len())
}
