//! Fine reference solutions, cached by a content hash of their inputs.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{SpectralField, SpectralGrid};
use crate::harness::csv::io_error;
use crate::harness::data::InitialData;
use crate::ops::ModelParams;
use crate::state::KgeState;

/// Everything that determines a reference solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceKey {
    pub params: ModelParams,
    pub data: InitialData,
    pub shape: Vec<usize>,
    pub tau: f64,
    pub t_final: f64,
}

impl ReferenceKey {
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("reference keys serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Debug, Clone)]
pub struct CachedReference {
    pub key: String,
    /// SHA-256 of the coefficient bits, recorded with every study using it.
    pub checksum: String,
    pub state: KgeState,
}

pub fn state_checksum(state: &KgeState) -> String {
    let mut hasher = Sha256::new();
    for c in state.psi.coeffs().iter().chain(state.eta.coeffs()) {
        hasher.update(c.re.to_le_bytes());
        hasher.update(c.im.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

#[derive(Serialize, Deserialize)]
struct StoredReference {
    key: String,
    checksum: String,
    time: f64,
    psi: Vec<[u64; 2]>,
    eta: Vec<[u64; 2]>,
}

fn to_bits(field: &SpectralField) -> Vec<[u64; 2]> {
    field.coeffs().iter().map(|c| [c.re.to_bits(), c.im.to_bits()]).collect()
}

fn from_bits(bits: &[[u64; 2]], grid: &Arc<SpectralGrid>) -> Result<SpectralField> {
    let coeffs = bits
        .iter()
        .map(|&[re, im]| Complex64::new(f64::from_bits(re), f64::from_bits(im)))
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}

/// Memory cache with an optional directory of JSON files behind it.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, Arc<CachedReference>>>,
}

impl ReferenceCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Self {
        ReferenceCache {
            dir: Some(dir.into()),
            memory: Mutex::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.memory.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn path_for(dir: &Path, key: &str) -> PathBuf {
        dir.join(format!("reference-{}.json", &key[..16]))
    }

    fn load(&self, key: &str, grid: &Arc<SpectralGrid>) -> Result<Option<CachedReference>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        let path = Self::path_for(dir, key);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
        let stored: StoredReference = serde_json::from_str(&text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if stored.key != key {
            return Ok(None);
        }
        let state = KgeState::new(from_bits(&stored.psi, grid)?, from_bits(&stored.eta, grid)?, stored.time)?;
        if state_checksum(&state) != stored.checksum {
            log::warn!("discarding corrupt reference {}", path.display());
            return Ok(None);
        }
        Ok(Some(CachedReference {
            key: stored.key,
            checksum: stored.checksum,
            state,
        }))
    }

    fn store(&self, reference: &CachedReference) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let path = Self::path_for(dir, &reference.key);
        let stored = StoredReference {
            key: reference.key.clone(),
            checksum: reference.checksum.clone(),
            time: reference.state.time,
            psi: to_bits(&reference.state.psi),
            eta: to_bits(&reference.state.eta),
        };
        let text = serde_json::to_string(&stored).expect("references serialize");
        fs::write(&path, text).map_err(|e| io_error(&path, e))
    }

    /// Returns the cached solution for `key`, running `compute` on a miss.
    pub fn get_or_compute<F>(&self, key: &ReferenceKey, grid: &Arc<SpectralGrid>, compute: F) -> Result<Arc<CachedReference>>
    where
        F: FnOnce() -> Result<KgeState>,
    {
        let digest = key.digest();
        if let Some(hit) = self.memory.lock().expect("cache lock").get(&digest) {
            return Ok(hit.clone());
        }
        let reference = match self.load(&digest, grid)? {
            Some(found) => found,
            None => {
                log::info!("computing reference {}", &digest[..16]);
                let state = compute()?;
                let reference = CachedReference {
                    checksum: state_checksum(&state),
                    key: digest.clone(),
                    state,
                };
                self.store(&reference)?;
                reference
            }
        };
        let reference = Arc::new(reference);
        self.memory
            .lock()
            .expect("cache lock")
            .insert(digest, reference.clone());
        Ok(reference)
    }
}
