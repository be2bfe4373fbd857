//! JSON cache of count records, replaced atomically on save.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use mirrorcount_core::instance::{CountRecord, InstanceKey, Method};
use mirrorcount_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::ENGINE_VERSION;

pub const CACHE_FILE: &str = "counts.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: InstanceKey,
    pub method: Method,
    pub precision: u32,
    pub record: CountRecord,
    pub engine_version: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    engine_version: String,
    entries: Vec<CacheEntry>,
}

#[derive(Debug)]
pub struct CountCache {
    path: PathBuf,
    entries: Vec<CacheEntry>,
    dirty: bool,
}

impl CountCache {
    /// Opens `dir/counts.json`; entries from another engine version are dropped.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(CACHE_FILE);
        let entries = match fs::read_to_string(&path) {
            Ok(text) => {
                let file: CacheFile = serde_json::from_str(&text)
                    .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
                file.entries
                    .into_iter()
                    .filter(|e| e.engine_version == ENGINE_VERSION)
                    .collect()
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        Ok(CountCache {
            path,
            entries,
            dirty: false,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &InstanceKey, method: Method, precision: u32) -> Option<&CountRecord> {
        self.entries
            .iter()
            .find(|e| &e.key == key && e.method == method && e.precision == precision)
            .map(|e| &e.record)
    }

    pub fn put(&mut self, record: CountRecord, precision: u32) {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.entries
            .retain(|e| !(e.key == record.key && e.method == record.method && e.precision == precision));
        self.entries.push(CacheEntry {
            key: record.key,
            method: record.method,
            precision,
            record,
            engine_version: ENGINE_VERSION.to_string(),
            created_at,
        });
        self.dirty = true;
    }

    pub fn save(&mut self) -> Result<()> {
        if !self.dirty {
            return Ok(());
        }
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        self.entries
            .sort_by_key(|a| (a.key, a.method, a.precision));
        let file = CacheFile {
            engine_version: ENGINE_VERSION.to_string(),
            entries: self.entries.clone(),
        };
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = self.path.with_extension("json.tmp");
        fs::write(&tmp, text).map_err(io)?;
        fs::rename(&tmp, &self.path).map_err(io)?;
        self.dirty = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mirrorcount_core::direct::{count_record_direct, Budget};
    use mirrorcount_core::field::make_field;
    use mirrorcount_core::instance::DworkInstance;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = make_field(5, 1).unwrap();
        let inst = DworkInstance::new(2, f, mirrorcount_core::field::FieldElement::ONE).unwrap();
        let rec = count_record_direct(&inst, &Budget::default()).unwrap();
        let mut c = CountCache::load(dir.path()).unwrap();
        assert!(c.is_empty());
        c.put(rec.clone(), 106);
        c.save().unwrap();
        let back = CountCache::load(dir.path()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back.get(&rec.key, Method::Direct, 106), Some(&rec));
        assert_eq!(back.get(&rec.key, Method::GaussFormula, 106), None);
        assert!(!dir.path().join("counts.json.tmp").exists());
    }

    #[test]
    fn malformed_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(CACHE_FILE), "{not json").unwrap();
        assert!(matches!(CountCache::load(dir.path()), Err(Error::Cache(_))));
    }
}
