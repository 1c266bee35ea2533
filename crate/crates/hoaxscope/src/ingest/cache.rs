//! On-disk fetch cache: `<root>/<kind>/<h[..2]>/<h>.json`, where `h` is the
//! SHA-256 of the normalized title. Reads take no lock; writes go to a
//! temporary file in the same directory and are renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FetchKind, FetchResult};
use crate::error::{Error, Result};

/// One cached fetch. Deleted and missing pages are stored too, as
/// tombstones without payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub format_version: u32,
    pub kind: FetchKind,
    pub result: FetchResult,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GcStats {
    pub evicted: usize,
    /// Entries that could not be read or parsed; left in place.
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, kind: FetchKind, normalized_title: &str) -> PathBuf {
        let digest = hex::encode(Sha256::digest(normalized_title.as_bytes()));
        self.root
            .join(kind.dir_name())
            .join(&digest[..2])
            .join(format!("{digest}.json"))
    }

    /// `None` on a miss. A corrupt entry counts as a miss and is logged.
    pub fn get(&self, kind: FetchKind, normalized_title: &str) -> Option<CacheEntry> {
        let path = self.path_for(kind, normalized_title);
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<CacheEntry>(&bytes) {
            Ok(entry) if entry.kind == kind => Some(entry),
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put(&self, entry: &CacheEntry) -> Result<PathBuf> {
        let path = self.path_for(entry.kind, &entry.result.page.title);
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
        serde_json::to_writer(&mut tmp, entry).map_err(|e| Error::io(&path, e.into()))?;
        tmp.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        Ok(path)
    }

    /// Removes entries fetched more than `max_age` before now.
    pub fn gc(&self, max_age: Duration) -> Result<GcStats> {
        self.gc_at(Utc::now(), max_age)
    }

    pub fn gc_at(&self, now: DateTime<Utc>, max_age: Duration) -> Result<GcStats> {
        if !self.root.is_dir() {
            return Err(Error::Validation(format!(
                "cache directory {} does not exist",
                self.root.display()
            )));
        }
        let max_age = chrono::Duration::from_std(max_age)
            .map_err(|_| Error::Usage("cache max age out of range".into()))?;
        let mut stats = GcStats::default();
        for path in entry_files(&self.root)? {
            let fetched_at = fs::read(&path)
                .map_err(|e| e.to_string())
                .and_then(|b| serde_json::from_slice::<CacheEntry>(&b).map_err(|e| e.to_string()))
                .and_then(|e| {
                    DateTime::parse_from_rfc3339(&e.result.fetched_at)
                        .map(|t| t.with_timezone(&Utc))
                        .map_err(|e| e.to_string())
                });
            match fetched_at {
                Ok(t) if now - t > max_age => {
                    fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
                    stats.evicted += 1;
                }
                Ok(_) => {}
                Err(msg) => {
                    log::warn!("skipping cache entry {}: {msg}", path.display());
                    stats.skipped += 1;
                }
            }
        }
        Ok(stats)
    }
}

/// Every `*.json` file two levels below a kind directory, sorted.
fn entry_files(root: &Path) -> Result<Vec<PathBuf>> {
    let read = |dir: &Path| -> Result<Vec<PathBuf>> {
        let mut v = Vec::new();
        for e in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            v.push(e.map_err(|e| Error::io(dir, e))?.path());
        }
        v.sort();
        Ok(v)
    };
    let mut out = Vec::new();
    for kind in read(root)?.into_iter().filter(|p| p.is_dir()) {
        for shard in read(&kind)?.into_iter().filter(|p| p.is_dir()) {
            out.extend(
                read(&shard)?
                    .into_iter()
                    .filter(|p| p.extension().is_some_and(|x| x == "json")),
            );
        }
    }
    Ok(out)
}
