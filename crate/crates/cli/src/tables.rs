//! Zero tables for the commands that need one: an explicit `table` path, a
//! cached computed table covering the range, or a fresh computation that is
//! then cached.

use std::fs;
use std::path::{Path, PathBuf};

use mesozeta::specialfn::EvaluationPrecision;
use mesozeta::zeros::{find_zeros, read_table, write_table, TableMetadata, TableSource, ZeroTable};

use crate::error::{invalid, CliError, Context};

pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("MESOZETA_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => Path::new(&home).join(".cache").join("mesozeta"),
        None => PathBuf::from(".mesozeta-cache"),
    }
}

#[derive(Debug)]
pub enum TableRequest {
    Loaded(ZeroTable),
    Range { lo: f64, hi: f64 },
}

impl TableRequest {
    /// A given table is read and checked against [lo, hi] right away.
    pub fn new(path: Option<&Path>, lo: f64, hi: f64) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let table = read_table(p).map_err(|e| invalid("table", e))?;
                table.check_coverage(lo, hi).map_err(|e| invalid("table", e))?;
                Ok(TableRequest::Loaded(table))
            }
            None => Ok(TableRequest::Range { lo: lo.max(0.0), hi }),
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_table(path).map(TableRequest::Loaded).map_err(|e| invalid("table", e))
    }

    pub fn load(self) -> Result<ZeroTable, CliError> {
        match self {
            TableRequest::Loaded(t) => Ok(t),
            TableRequest::Range { lo, hi } => computed_table(lo, hi),
        }
    }
}

fn metadata(path: &Path) -> Option<TableMetadata> {
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".json");
    serde_json::from_slice(&fs::read(PathBuf::from(sidecar)).ok()?).ok()
}

/// Smallest cached computed table covering [lo, hi], else a new one.
pub fn computed_table(lo: f64, hi: f64) -> Result<ZeroTable, CliError> {
    let dir = cache_dir();
    let mut best: Option<(f64, PathBuf)> = None;
    if let Ok(entries) = fs::read_dir(&dir) {
        for entry in entries.flatten() {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("ztbl") {
                continue;
            }
            let Some(meta) = metadata(&path) else {
                continue;
            };
            let covers = meta.source == TableSource::Computed && meta.t_min <= lo && meta.t_max >= hi;
            let size = meta.t_max - meta.t_min;
            if covers && best.as_ref().map_or(true, |(s, _)| size < *s) {
                best = Some((size, path));
            }
        }
    }
    if let Some((_, path)) = best {
        if let Ok(t) = read_table(&path) {
            return Ok(t);
        }
    }
    let table = find_zeros(lo, hi, &EvaluationPrecision::default()).context("computing zeros")?;
    fs::create_dir_all(&dir).context("creating cache directory")?;
    let path = dir.join(format!("zeros-{lo}-{hi}.ztbl"));
    write_table(&table, &path).context("caching zero table")?;
    Ok(table)
}
