//! Flat-file cache of expensive results, keyed by quiver content hash,
//! result kind, parameters and tool version.
//!
//! Writers take an advisory lock file in the cache directory; readers do
//! not. Entries are written to a temporary file and renamed into place.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::TOOL_VERSION;

pub const CACHE_ENV: &str = "MODROOT_CACHE";
pub const DEFAULT_DIR: &str = ".modroot-cache";

const LOCK_ATTEMPTS: usize = 100;
const LOCK_WAIT: Duration = Duration::from_millis(50);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub quiver_hash: String,
    pub kind: String,
    pub params: String,
    pub tool_version: String,
    pub payload: serde_json::Value,
}

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()) }
    }

    /// `$MODROOT_CACHE` if set, else `.modroot-cache/` beside the quiver.
    pub fn for_quiver(quiver_path: &Path, enabled: bool) -> Self {
        if !enabled {
            return Self::disabled();
        }
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            return Self::at(dir);
        }
        let parent = quiver_path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::at(parent.join(DEFAULT_DIR))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn entry_path(dir: &Path, hash: &str, kind: &str, params: &str) -> PathBuf {
        let key = format!("{hash}\n{kind}\n{params}\n{TOOL_VERSION}");
        let digest = hex::encode(Sha256::digest(key.as_bytes()));
        dir.join(format!("{kind}-{}.json", &digest[..32]))
    }

    fn lock(dir: &Path) -> Option<LockGuard> {
        let path = dir.join(".lock");
        for _ in 0..LOCK_ATTEMPTS {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Some(LockGuard(path)),
                Err(_) => thread::sleep(LOCK_WAIT),
            }
        }
        None
    }

    /// Cached value if present and matching, otherwise computes and stores
    /// it. Cache failures never fail the computation.
    pub fn get_or_compute<T, F>(&self, hash: &str, kind: &str, params: &str, compute: F) -> Result<(T, bool)>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let Some(dir) = &self.dir else {
            return Ok((compute()?, false));
        };
        let path = Self::entry_path(dir, hash, kind, params);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(entry) = serde_json::from_str::<CacheEntry>(&text) {
                if entry.quiver_hash == hash
                    && entry.kind == kind
                    && entry.params == params
                    && entry.tool_version == TOOL_VERSION
                {
                    if let Ok(v) = serde_json::from_value(entry.payload) {
                        return Ok((v, true));
                    }
                }
            }
        }
        let value = compute()?;
        let _ = Self::store(dir, &path, hash, kind, params, &value);
        Ok((value, false))
    }

    fn store<T: Serialize>(dir: &Path, path: &Path, hash: &str, kind: &str, params: &str, value: &T) -> Result<()> {
        fs::create_dir_all(dir)?;
        let Some(_guard) = Self::lock(dir) else {
            return Ok(());
        };
        let entry = CacheEntry {
            quiver_hash: hash.into(),
            kind: kind.into(),
            params: params.into(),
            tool_version: TOOL_VERSION.into(),
            payload: serde_json::to_value(value)?,
        };
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_returns_identical_payload() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        let (a, hit) = cache.get_or_compute("h", "roots", "p", || Ok(vec![1, 2, 3])).unwrap();
        assert!(!hit);
        let (b, hit): (Vec<i32>, bool) = cache.get_or_compute("h", "roots", "p", || unreachable!()).unwrap();
        assert!(hit);
        assert_eq!(a, b);
        let (_, hit) = cache.get_or_compute("h", "roots", "other", || Ok(vec![0])).unwrap();
        assert!(!hit);
        assert!(!dir.path().join(".lock").exists());
    }

    #[test]
    fn disabled_cache_always_computes() {
        let cache = Cache::disabled();
        let (v, hit) = cache.get_or_compute("h", "k", "", || Ok(5)).unwrap();
        assert_eq!((v, hit), (5, false));
    }

    #[test]
    fn corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        cache.get_or_compute("h", "k", "", || Ok(1)).unwrap();
        for e in fs::read_dir(dir.path()).unwrap() {
            fs::write(e.unwrap().path(), "garbage").unwrap();
        }
        let (v, hit) = cache.get_or_compute("h", "k", "", || Ok(1)).unwrap();
        assert_eq!((v, hit), (1, false));
    }
}
