//! Volume cache keyed by canonical Conway symbols, with reference tables.
//!
//! Records live in memory and, when a directory is configured, are appended
//! to `volumes.jsonl` there. Reference rows are kept apart from computed
//! ones and are never replaced by them.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::conway::{canonical, ConwaySymbol};
use crate::error::{Error, Result};
use crate::solver::{conway_volume, SolverOptions, HYPERBOLIC_THRESHOLD};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "LINKVOL_CACHE";

pub const CACHE_FILE: &str = "volumes.jsonl";

/// Reference and computed volumes differing by more than this are reported.
pub const COMPARE_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordSource {
    Computed,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeRecord {
    pub key: String,
    pub volume: f64,
    pub residual: f64,
    pub solver_seed: u64,
    pub source: RecordSource,
}

impl VolumeRecord {
    pub fn computed(key: &str, volume: f64, residual: f64, solver_seed: u64) -> VolumeRecord {
        VolumeRecord {
            key: key.to_string(),
            volume,
            residual,
            solver_seed,
            source: RecordSource::Computed,
        }
    }

    pub fn reference(key: &str, volume: f64) -> VolumeRecord {
        VolumeRecord {
            key: key.to_string(),
            volume,
            residual: 0.0,
            solver_seed: 0,
            source: RecordSource::Reference,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Entry {
    reference: Option<VolumeRecord>,
    computed: Option<VolumeRecord>,
}

/// A key whose reference and computed volumes disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub key: String,
    pub reference: f64,
    pub computed: f64,
    pub difference: f64,
}

#[derive(Debug, Default)]
pub struct VolumeStore {
    entries: RwLock<BTreeMap<String, Entry>>,
    path: Option<PathBuf>,
    writer: Mutex<Option<File>>,
}

impl VolumeStore {
    /// A store without persistence.
    pub fn in_memory() -> VolumeStore {
        VolumeStore::default()
    }

    /// Open (creating if needed) the cache in `dir`.
    pub fn open(dir: &Path) -> Result<VolumeStore> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let store = VolumeStore {
            path: Some(path.clone()),
            ..VolumeStore::default()
        };
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: VolumeRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::Cache(format!("{}:{}: {e}", path.display(), i + 1)))?;
                store.insert(record);
            }
        }
        Ok(store)
    }

    /// The cache named by `LINKVOL_CACHE`, or an in-memory store when unset.
    pub fn from_env() -> Result<VolumeStore> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => VolumeStore::open(Path::new(&dir)),
            _ => Ok(VolumeStore::in_memory()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn insert(&self, record: VolumeRecord) -> bool {
        let mut entries = self.entries.write().expect("store lock");
        let entry = entries.entry(record.key.clone()).or_default();
        match record.source {
            RecordSource::Reference => {
                entry.reference = Some(record);
                true
            }
            RecordSource::Computed => {
                entry.computed = Some(record);
                entry.reference.is_none()
            }
        }
    }

    fn append(&self, record: &VolumeRecord) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let mut writer = self.writer.lock().expect("writer lock");
        if writer.is_none() {
            *writer = Some(OpenOptions::new().create(true).append(true).open(path)?);
        }
        let file = writer.as_mut().expect("just opened");
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(())
    }

    /// Reference record if present, otherwise the computed one.
    pub fn get(&self, key: &str) -> Result<Option<VolumeRecord>> {
        let key = canonical(key)?;
        let entries = self.entries.read().expect("store lock");
        Ok(entries.get(&key).and_then(|e| e.reference.clone().or_else(|| e.computed.clone())))
    }

    pub fn get_computed(&self, key: &str) -> Result<Option<VolumeRecord>> {
        let key = canonical(key)?;
        let entries = self.entries.read().expect("store lock");
        Ok(entries.get(&key).and_then(|e| e.computed.clone()))
    }

    /// Store `record` under its canonical key. Returns whether [`get`](Self::get)
    /// now answers with it; a computed record never shadows a reference one.
    pub fn put(&self, mut record: VolumeRecord) -> Result<bool> {
        record.key = canonical(&record.key)?;
        if !record.volume.is_finite() || !record.residual.is_finite() {
            return Err(Error::Cache(format!("non-finite record for {:?}", record.key)));
        }
        self.append(&record)?;
        Ok(self.insert(record))
    }

    /// Cached volume of `key`, computing and storing it on a miss.
    pub fn get_or_compute(&self, key: &str, compute: impl FnOnce() -> Result<VolumeRecord>) -> Result<VolumeRecord> {
        if let Some(r) = self.get(key)? {
            return Ok(r);
        }
        let record = compute()?;
        self.put(record.clone())?;
        Ok(record)
    }

    /// Load `symbol,volume` rows (an optional header is skipped).
    pub fn load_reference(&self, path: &Path) -> Result<usize> {
        self.load_reference_from(File::open(path)?)
    }

    pub fn load_reference_from(&self, reader: impl Read) -> Result<usize> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut count = 0;
        for (i, row) in csv.records().enumerate() {
            let line = i + 1;
            let row = row.map_err(|e| Error::Csv {
                line,
                message: e.to_string(),
            })?;
            if row.len() != 2 {
                return Err(Error::Csv {
                    line,
                    message: format!("expected `symbol,volume`, found {} fields", row.len()),
                });
            }
            if i == 0 && &row[0] == "symbol" && &row[1] == "volume" {
                continue;
            }
            let volume: f64 = row[1].parse().map_err(|_| Error::Csv {
                line,
                message: format!("bad volume {:?}", &row[1]),
            })?;
            let key = canonical(&row[0]).map_err(|e| Error::Csv {
                line,
                message: e.to_string(),
            })?;
            self.put(VolumeRecord::reference(&key, volume))?;
            count += 1;
        }
        Ok(count)
    }

    /// Keys whose reference and computed volumes differ by more than
    /// [`COMPARE_TOLERANCE`].
    pub fn compare(&self) -> Vec<Mismatch> {
        let entries = self.entries.read().expect("store lock");
        entries
            .iter()
            .filter_map(|(key, e)| {
                let (r, c) = (e.reference.as_ref()?, e.computed.as_ref()?);
                let difference = c.volume - r.volume;
                (difference.abs() > COMPARE_TOLERANCE).then(|| Mismatch {
                    key: key.clone(),
                    reference: r.volume,
                    computed: c.volume,
                    difference,
                })
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Volume of one symbol as seen through a cache.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CachedVolume {
    pub symbol: String,
    pub volume: f64,
    pub hyperbolic: bool,
    pub converged: bool,
    pub residual: f64,
    pub cached: bool,
}

/// Solver front end that reads through an optional [`VolumeStore`].
#[derive(Clone, Copy, Debug)]
pub struct Volumes<'a> {
    pub options: &'a SolverOptions,
    pub store: Option<&'a VolumeStore>,
}

impl<'a> Volumes<'a> {
    pub fn new(options: &'a SolverOptions, store: Option<&'a VolumeStore>) -> Volumes<'a> {
        Volumes { options, store }
    }

    pub fn volume(&self, symbol: &ConwaySymbol) -> Result<CachedVolume> {
        let key = symbol.to_string();
        if let Some(store) = self.store {
            if let Some(r) = store.get(&key)? {
                return Ok(CachedVolume {
                    symbol: key,
                    volume: r.volume,
                    hyperbolic: r.volume >= HYPERBOLIC_THRESHOLD,
                    converged: true,
                    residual: r.residual,
                    cached: true,
                });
            }
        }
        let report = conway_volume(symbol, self.options)?;
        if let (Some(store), true) = (self.store, report.converged) {
            store.put(VolumeRecord::computed(&key, report.volume, report.residual, self.options.seed))?;
        }
        Ok(CachedVolume {
            symbol: key,
            volume: report.volume,
            hyperbolic: report.hyperbolic,
            converged: report.converged,
            residual: report.residual,
            cached: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows_win() {
        let store = VolumeStore::in_memory();
        assert!(store.put(VolumeRecord::computed("2 2", 2.03, 1e-12, 0)).unwrap());
        assert!(store.put(VolumeRecord::reference("2  2", 2.0298832128)).unwrap());
        assert!(!store.put(VolumeRecord::computed("2 2", 2.5, 1e-12, 0)).unwrap());
        let r = store.get("2 2").unwrap().unwrap();
        assert_eq!(r.source, RecordSource::Reference);
        assert_eq!(r.volume, 2.0298832128);
        assert_eq!(store.compare().len(), 1);
        assert!(store.get("3 3").unwrap().is_none());
    }

    #[test]
    fn quoted_symbols() {
        let store = VolumeStore::in_memory();
        let n = store
            .load_reference_from("symbol,volume\n\"2,2,-3\",1.5\n2 1 2,3.663862377\n".as_bytes())
            .unwrap();
        assert_eq!(n, 2);
        assert_eq!(store.get("2,2,-3").unwrap().unwrap().volume, 1.5);
        assert!(matches!(
            store.load_reference_from("2 2,x\n".as_bytes()),
            Err(Error::Csv { line: 1, .. })
        ));
        assert!(matches!(
            store.load_reference_from("2 2\n".as_bytes()),
            Err(Error::Csv { line: 1, .. })
        ));
    }
}
