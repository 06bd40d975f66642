//! Content-addressed on-disk store for computed cells.
//!
//! The key hashes the tool version, command, parameters and seed, so results
//! from another version are never reused. Files are written to a temporary
//! name and linked into place without overwriting, which makes concurrent
//! writers safe.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::report::{Cell, TOOL_VERSION};

pub const CACHE_ENV: &str = "TORSIONGEN_CACHE";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    version: &'a str,
    command: &'a str,
    params: &'a BTreeMap<String, String>,
    seed: Option<u64>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    /// The environment variable wins over an explicit directory.
    pub fn resolve(explicit: Option<&Path>) -> std::io::Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Cache::new(PathBuf::from(dir)).map(Some),
            _ => explicit.map(Cache::new).transpose(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(command: &str, params: &BTreeMap<String, String>, seed: Option<u64>) -> String {
        Self::key_for_version(TOOL_VERSION, command, params, seed)
    }

    pub fn key_for_version(version: &str, command: &str, params: &BTreeMap<String, String>, seed: Option<u64>) -> String {
        let material = KeyMaterial {
            version,
            command,
            params,
            seed,
        };
        let bytes = serde_json::to_vec(&material).expect("key material serialises");
        hex::encode(Sha256::digest(&bytes))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    /// A stored cell, or `None` if absent or unreadable.
    pub fn get(&self, key: &str) -> Option<Cell> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Stores a cell unless another writer got there first.
    pub fn put(&self, key: &str, cell: &Cell) -> std::io::Result<()> {
        self.write(key, cell, false)
    }

    /// Replaces a stored cell, e.g. after a failed spot check.
    pub fn replace(&self, key: &str, cell: &Cell) -> std::io::Result<()> {
        self.write(key, cell, true)
    }

    fn write(&self, key: &str, cell: &Cell, overwrite: bool) -> std::io::Result<()> {
        let path = self.path(key);
        let parent = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(parent)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
        tmp.write_all(serde_json::to_string(cell).expect("cells serialise").as_bytes())?;
        tmp.flush()?;
        if overwrite {
            tmp.persist(&path).map_err(|e| e.error)?;
            return Ok(());
        }
        match tmp.persist_noclobber(&path) {
            Ok(_) => Ok(()),
            Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => Ok(()),
            Err(e) => Err(e.error),
        }
    }
}
