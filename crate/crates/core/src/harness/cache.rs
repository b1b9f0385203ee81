//! On-disk cache of the stationary radius and the bifurcation table, keyed
//! by `(β, σ̃)`. Writes go through a temporary file in the cache directory
//! followed by a rename, so readers only ever see complete entries.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::BifurcationTable;
use crate::error::{Error, Result};

/// Layout version of an entry; bump when the stored fields change.
pub const CACHE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedThreshold {
    pub n_max: usize,
    pub rel_tol: f64,
    pub mu_star: crate::dispersion::MuStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema: u32,
    pub version: String,
    pub beta: f64,
    pub sigma_tilde: f64,
    pub radius: f64,
    pub table: BifurcationTable,
    #[serde(default)]
    pub threshold: Option<CachedThreshold>,
}

/// What a lookup found.
#[derive(Debug, Clone, PartialEq)]
pub enum Lookup {
    Hit(CacheEntry),
    Miss,
    /// The entry existed but could not be used; the reason is logged.
    Stale(String),
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
    version: String,
}

/// `x` rounded to 12 significant digits, as text.
fn key_part(x: f64) -> String {
    format!("{x:.11e}")
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>, version: impl Into<String>) -> Self {
        Cache {
            dir: dir.into(),
            version: version.into(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(beta: f64, sigma_tilde: f64) -> String {
        format!("b{}_s{}", key_part(beta), key_part(sigma_tilde))
    }

    pub fn path(&self, beta: f64, sigma_tilde: f64) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(beta, sigma_tilde)))
    }

    pub fn lookup(&self, beta: f64, sigma_tilde: f64) -> Lookup {
        let path = self.path(beta, sigma_tilde);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return self.stale(&path, format!("unreadable: {e}")),
        };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return self.stale(&path, format!("corrupt: {e}")),
        };
        if entry.schema != CACHE_SCHEMA || entry.version != self.version {
            return self.stale(
                &path,
                format!("written by version {} schema {}", entry.version, entry.schema),
            );
        }
        if Self::key(entry.beta, entry.sigma_tilde) != Self::key(beta, sigma_tilde) {
            return self.stale(&path, "key does not match contents".into());
        }
        Lookup::Hit(entry)
    }

    fn stale(&self, path: &Path, why: String) -> Lookup {
        log::warn!("cache entry {} ignored ({why}); recomputing", path.display());
        Lookup::Stale(why)
    }

    /// Writes `entry` atomically.
    pub fn store(&self, entry: &CacheEntry) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path(entry.beta, entry.sigma_tilde);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let text = serde_json::to_string_pretty(entry)?;
        tmp.write_all(text.as_bytes()).map_err(|e| Error::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        Ok(())
    }

    pub fn new_entry(&self, table: BifurcationTable, threshold: Option<CachedThreshold>) -> CacheEntry {
        CacheEntry {
            schema: CACHE_SCHEMA,
            version: self.version.clone(),
            beta: table.beta,
            sigma_tilde: table.sigma_tilde,
            radius: table.radius,
            table,
            threshold,
        }
    }
}
