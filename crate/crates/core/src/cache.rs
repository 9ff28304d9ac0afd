// SPDX-License-Identifier: MIT OR Apache-2.0

//! Content-addressed, write-once result cache.
//!
//! Keys are SHA-256 digests of the operation name and the canonical JSON
//! serialization of its input. Entries are written to a temporary file and
//! renamed into place, so readers never observe partial writes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "K3LAT_CACHE_DIR";

/// One cached result.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CacheEntry {
    pub key: String,
    pub operation: String,
    pub input: Value,
    pub value: Value,
    pub version: String,
    pub wall_ms: u64,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// `sha256(operation ‖ 0x00 ‖ canonical JSON of input)` in hex.
pub fn cache_key(operation: &str, input: &Value) -> String {
    let mut h = Sha256::new();
    h.update(operation.as_bytes());
    h.update([0u8]);
    // serde_json maps are ordered by key, so this serialization is canonical
    h.update(input.to_string().as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The directory from `K3LAT_CACHE_DIR`, else `$XDG_CACHE_HOME/k3lat`,
    /// else `$HOME/.cache/k3lat`.
    pub fn from_env() -> Self {
        if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
            return Cache::new(d);
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")))
            .unwrap_or_else(std::env::temp_dir);
        Cache::new(base.join("k3lat"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, operation: &str, input: &Value) -> Result<Option<CacheEntry>> {
        let key = cache_key(operation, input);
        let p = self.path(&key);
        if !p.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p)?;
        let e: CacheEntry = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("cache entry {key}: {e}")))?;
        if e.key != key || e.operation != operation || &e.input != input {
            return Err(Error::Verification(format!("cache entry {key} does not match its key")));
        }
        Ok(Some(e))
    }

    /// Stores a value unless the key is already present (write-once).
    /// Returns the entry now on disk.
    pub fn put(&self, operation: &str, input: &Value, value: Value, wall_ms: u64) -> Result<CacheEntry> {
        if let Some(e) = self.get(operation, input)? {
            return Ok(e);
        }
        fs::create_dir_all(&self.dir)?;
        let key = cache_key(operation, input);
        let entry = CacheEntry {
            key: key.clone(),
            operation: operation.to_string(),
            input: input.clone(),
            value,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms,
        };
        let tmp = self.dir.join(format!(".{key}.{}.{}.tmp", std::process::id(), TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)));
        fs::write(&tmp, serde_json::to_vec_pretty(&entry).expect("serializable"))?;
        let target = self.path(&key);
        if target.exists() {
            // another writer won; its content is authoritative
            fs::remove_file(&tmp)?;
            return self.get(operation, input)?.ok_or_else(|| Error::Io(format!("cache entry {key} vanished")));
        }
        fs::rename(&tmp, &target)?;
        Ok(entry)
    }

    /// Returns the cached value or computes and stores it. With `verify`, a
    /// cache hit is recomputed and must match byte for byte.
    pub fn get_or_compute<F>(&self, operation: &str, input: &Value, verify: bool, compute: F) -> Result<Value>
    where
        F: FnOnce() -> Result<Value>,
    {
        if let Some(e) = self.get(operation, input)? {
            if verify {
                let fresh = compute()?;
                if fresh.to_string() != e.value.to_string() {
                    return Err(Error::Verification(format!("cache entry {} differs from recomputation", e.key)));
                }
            }
            return Ok(e.value);
        }
        let start = Instant::now();
        let v = compute()?;
        let wall = start.elapsed().as_millis() as u64;
        Ok(self.put(operation, input, v, wall)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn scratch_dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("k3lat-cache-test-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn key_ignores_map_insertion_order() {
        let a: Value = serde_json::from_str(r#"{"m": 2, "budget": 5}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"budget": 5, "m": 2}"#).unwrap();
        assert_eq!(cache_key("frames", &a), cache_key("frames", &b));
        assert_ne!(cache_key("frames", &a), cache_key("genus", &a));
    }

    #[test]
    fn write_once_and_verify() {
        let c = Cache::new(scratch_dir("once"));
        let input = json!({"m": 1});
        let v = c.get_or_compute("op", &input, false, || Ok(json!([1, 2, 3]))).unwrap();
        assert_eq!(v, json!([1, 2, 3]));
        // a second put does not overwrite
        let e = c.put("op", &input, json!("other"), 0).unwrap();
        assert_eq!(e.value, json!([1, 2, 3]));
        assert!(c.get_or_compute("op", &input, true, || Ok(json!([1, 2, 3]))).is_ok());
        assert!(matches!(c.get_or_compute("op", &input, true, || Ok(json!([3]))), Err(Error::Verification(_))));
        let _ = fs::remove_dir_all(c.dir());
    }
}
