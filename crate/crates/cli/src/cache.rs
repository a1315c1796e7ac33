//! Content-addressed on-disk cache for enumeration and iso-count results.
//!
//! Keys are SHA-256 digests of the canonical JSON of the request. An entry
//! written by another tool version counts as a miss. Writes go through a
//! temporary file in the cache directory and are renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "RAMSEY_FORGE_CACHE";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub version: String,
    pub created_unix: u64,
    pub request: serde_json::Value,
    pub value: serde_json::Value,
}

pub struct Cache {
    dir: PathBuf,
    version: String,
}

/// Canonical serialization: object keys sorted, no whitespace.
pub fn canonical_json(v: &impl Serialize) -> Result<String> {
    // serde_json maps are ordered by key unless `preserve_order` is enabled
    Ok(serde_json::to_string(&serde_json::to_value(v)?)?)
}

pub fn cache_key(request: &impl Serialize) -> Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_json(request)?.as_bytes())))
}

/// `--cache-dir`, then `RAMSEY_FORGE_CACHE`, then the user cache directory.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(ENV_VAR).filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p));
    }
    if let Some(p) = std::env::var_os("XDG_CACHE_HOME").filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p).join("ramsey-forge"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("ramsey-forge"))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache::with_version(dir, TOOL_VERSION)
    }

    pub fn with_version(dir: impl Into<PathBuf>, version: impl Into<String>) -> Self {
        Cache {
            dir: dir.into(),
            version: version.into(),
        }
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, request: &impl Serialize) -> Result<Option<serde_json::Value>> {
        let key = cache_key(request)?;
        let Ok(text) = fs::read_to_string(self.path_for(&key)) else {
            return Ok(None);
        };
        let Ok(entry) = serde_json::from_str::<CacheEntry>(&text) else {
            return Ok(None);
        };
        if entry.key != key || entry.version != self.version {
            return Ok(None);
        }
        Ok(Some(entry.value))
    }

    pub fn put(&self, request: &impl Serialize, value: &serde_json::Value) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let key = cache_key(request)?;
        let entry = CacheEntry {
            key: key.clone(),
            version: self.version.clone(),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            request: serde_json::to_value(request)?,
            value: value.clone(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
        tmp.persist(self.path_for(&key))?;
        Ok(())
    }

    /// Returns the cached value or computes, stores and returns it.
    pub fn get_or_compute(
        &self,
        request: &impl Serialize,
        compute: impl FnOnce() -> Result<serde_json::Value>,
    ) -> Result<serde_json::Value> {
        if let Some(v) = self.get(request)? {
            return Ok(v);
        }
        let v = compute()?;
        self.put(request, &v)?;
        Ok(v)
    }
}
