//! Grundy cache persistence: newline-delimited JSON records keyed by
//! (n, k, canonical forbidden-set bitmask).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::factorial;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad cache header: expected {{\"pap_cache\":1}}")]
    BadHeader,
    #[error("bad cache record on line {0}: {1}")]
    BadRecord(usize, String),
    #[error("mask {mask:#x} does not fit S_{k}")]
    MaskOverflow { mask: u32, k: usize },
}

#[derive(Serialize, Deserialize)]
struct Header {
    pap_cache: u32,
}

#[derive(Serialize, Deserialize)]
struct Record {
    n: usize,
    k: usize,
    f: String,
    sg: u8,
}

/// Persisted Grundy values for all (n, k) pairs seen in a run.
#[derive(Default, Clone, Debug)]
pub struct GrundyStore {
    entries: HashMap<(usize, usize), HashMap<u32, u8>>,
}

impl GrundyStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, CacheError> {
        let file = File::open(path)?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines();
        let header_line = lines.next().ok_or(CacheError::BadHeader)??;
        let header: Header =
            serde_json::from_str(&header_line).map_err(|_| CacheError::BadHeader)?;
        if header.pap_cache != 1 {
            return Err(CacheError::BadHeader);
        }
        let mut store = GrundyStore::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(&line)
                .map_err(|e| CacheError::BadRecord(i + 2, e.to_string()))?;
            let mask = u32::from_str_radix(&rec.f, 16)
                .map_err(|e| CacheError::BadRecord(i + 2, e.to_string()))?;
            if rec.k <= 4 && u64::from(mask) >= 1u64 << factorial(rec.k) {
                return Err(CacheError::MaskOverflow { mask, k: rec.k });
            }
            store.entries.entry((rec.n, rec.k)).or_default().insert(mask, rec.sg);
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer(&mut w, &Header { pap_cache: 1 })?;
        writeln!(w)?;
        let mut keys: Vec<_> = self.entries.keys().copied().collect();
        keys.sort_unstable();
        for (n, k) in keys {
            let map = &self.entries[&(n, k)];
            let mut masks: Vec<_> = map.keys().copied().collect();
            masks.sort_unstable();
            for mask in masks {
                let rec = Record {
                    n,
                    k,
                    f: format!("{mask:06x}"),
                    sg: map[&mask],
                };
                serde_json::to_writer(&mut w, &rec)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn table(&self, n: usize, k: usize) -> Option<&HashMap<u32, u8>> {
        self.entries.get(&(n, k))
    }

    pub fn merge_in(&mut self, n: usize, k: usize, values: &HashMap<u32, u8>) {
        self.entries.entry((n, k)).or_default().extend(values);
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<serde_json::Error> for CacheError {
    fn from(e: serde_json::Error) -> Self {
        CacheError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
