//! Persistent read-through cache of exact power sums.
//!
//! The file is one JSON array of [`CacheEntry`]. Values are decimal strings so
//! any JSON reader keeps them exact. A file that fails to parse is reported
//! and ignored; it is replaced on the next save.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use descent_core::{Engine, Natural, PowerSumSource};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Tag written next to every cached value; entries from another version are ignored.
pub const ENGINE_VERSION: &str = concat!("descent ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: u32,
    pub r: u32,
    pub value: String,
    pub engine_version: String,
}

#[derive(Debug)]
pub struct Cache {
    engine: Engine,
    path: Option<PathBuf>,
    values: RwLock<BTreeMap<(u32, u32), Natural>>,
    dirty: RwLock<bool>,
    writer: Mutex<()>,
    warnings: Vec<String>,
}

impl Cache {
    /// A cache that never touches the disk.
    pub fn in_memory(engine: Engine) -> Self {
        Cache {
            engine,
            path: None,
            values: RwLock::new(BTreeMap::new()),
            dirty: RwLock::new(false),
            writer: Mutex::new(()),
            warnings: Vec::new(),
        }
    }

    /// Loads `path` if it exists. Unreadable or malformed files produce a
    /// warning and an empty cache.
    pub fn open(engine: Engine, path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let mut cache = Cache::in_memory(engine);
        match fs::read_to_string(&path) {
            Ok(text) => match parse_entries(&text) {
                Ok(values) => *cache.values.get_mut().expect("fresh lock") = values,
                Err(why) => cache
                    .warnings
                    .push(format!("ignoring cache {}: {why}", path.display())),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => cache
                .warnings
                .push(format!("ignoring cache {}: {e}", path.display())),
        }
        cache.path = Some(path);
        cache
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Problems met while loading.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.values.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: u32, r: u32) -> Option<Natural> {
        self.values
            .read()
            .expect("cache lock poisoned")
            .get(&(n, r))
            .cloned()
    }

    pub fn entries(&self) -> Vec<CacheEntry> {
        self.values
            .read()
            .expect("cache lock poisoned")
            .iter()
            .map(|(&(n, r), v)| CacheEntry {
                n,
                r,
                value: v.to_string(),
                engine_version: ENGINE_VERSION.to_string(),
            })
            .collect()
    }

    /// Writes the cache if anything was added since loading. The file is
    /// replaced atomically by renaming a sibling temporary file.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let _guard = self.writer.lock().expect("writer lock poisoned");
        if !*self.dirty.read().expect("cache lock poisoned") {
            return Ok(());
        }
        let io = |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        let json = serde_json::to_string_pretty(&self.entries()).expect("entries serialize");
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(json.as_bytes()).map_err(io)?;
        file.write_all(b"\n").map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)?;
        *self.dirty.write().expect("cache lock poisoned") = false;
        Ok(())
    }
}

fn parse_entries(text: &str) -> std::result::Result<BTreeMap<(u32, u32), Natural>, String> {
    let entries: Vec<CacheEntry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut values = BTreeMap::new();
    for e in entries {
        if e.engine_version != ENGINE_VERSION {
            continue;
        }
        let value: Natural = e
            .value
            .parse()
            .map_err(|_| format!("value for (n={}, r={}) is not a decimal integer", e.n, e.r))?;
        if values.insert((e.n, e.r), value).is_some() {
            return Err(format!("duplicate entry for (n={}, r={})", e.n, e.r));
        }
    }
    Ok(values)
}

impl PowerSumSource for Cache {
    fn power_sum(&self, n: u32, r: u32) -> descent_core::Result<Natural> {
        Ok(self.power_sums(n, &[r])?.remove(0))
    }

    fn power_sums(&self, n: u32, rs: &[u32]) -> descent_core::Result<Vec<Natural>> {
        let missing: Vec<u32> = {
            let values = self.values.read().expect("cache lock poisoned");
            rs.iter()
                .copied()
                .filter(|&r| !values.contains_key(&(n, r)))
                .collect()
        };
        if !missing.is_empty() {
            let computed = self.engine.power_sums(n, &missing)?;
            let mut values = self.values.write().expect("cache lock poisoned");
            for (r, v) in missing.into_iter().zip(computed) {
                values.insert((n, r), v);
            }
            *self.dirty.write().expect("cache lock poisoned") = true;
        }
        let values = self.values.read().expect("cache lock poisoned");
        Ok(rs.iter().map(|&r| values[&(n, r)].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_bad_values_and_duplicates() {
        let bad = format!(r#"[{{"n":3,"r":2,"value":"ten","engine_version":"{ENGINE_VERSION}"}}]"#);
        assert!(parse_entries(&bad).is_err());
        let dup = format!(
            r#"[{{"n":3,"r":2,"value":"10","engine_version":"{v}"}},{{"n":3,"r":2,"value":"10","engine_version":"{v}"}}]"#,
            v = ENGINE_VERSION
        );
        assert!(parse_entries(&dup).is_err());
        assert!(parse_entries("{").is_err());
    }

    #[test]
    fn other_versions_are_skipped() {
        let old = r#"[{"n":3,"r":2,"value":"11","engine_version":"other"}]"#;
        assert!(parse_entries(old).unwrap().is_empty());
    }

    #[test]
    fn in_memory_cache_computes_once() {
        let cache = Cache::in_memory(Engine::default());
        assert_eq!(cache.power_sum(3, 2).unwrap(), Natural::from(10u32));
        assert_eq!(cache.get(3, 2), Some(Natural::from(10u32)));
        assert!(cache.save().is_ok());
    }
}
