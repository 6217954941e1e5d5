//! Output directory handling: exclusive lock, hashed file writes and the
//! manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const LOCK_NAME: &str = ".lock";
pub const CACHE_DIR: &str = ".cache";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub stages: Vec<String>,
    pub settings: BTreeMap<String, String>,
    pub files: Vec<ManifestEntry>,
}

/// Writes bundle files under an exclusively locked output directory and
/// records their hashes. The lock is released on drop.
#[derive(Debug)]
pub struct BundleWriter {
    root: PathBuf,
    files: BTreeMap<String, ManifestEntry>,
    _lock: File,
}

impl BundleWriter {
    pub fn open(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        let lock = File::create(root.join(LOCK_NAME))?;
        lock.try_lock().map_err(|e| {
            std::io::Error::other(format!("{} is in use by another run ({e})", root.display()))
        })?;
        Ok(BundleWriter {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
            _lock: lock,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.root.join(CACHE_DIR)
    }

    /// Writes `bytes` to `rel` (forward slashes) inside the bundle.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> std::io::Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        self.files.insert(
            rel.to_string(),
            ManifestEntry {
                path: rel.to_string(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len() as u64,
            },
        );
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> std::io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        self.write(rel, &bytes)
    }

    /// Writes the manifest, listing files in path order.
    pub fn finish(
        mut self,
        config_sha256: String,
        seed: u64,
        stages: Vec<String>,
        settings: BTreeMap<String, String>,
    ) -> std::io::Result<Manifest> {
        let manifest = Manifest {
            tool: "shibboleth".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256,
            seed,
            stages,
            settings,
            files: std::mem::take(&mut self.files).into_values().collect(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        fs::write(self.root.join(MANIFEST_NAME), bytes)?;
        Ok(manifest)
    }
}

/// Files named in a manifest whose content no longer matches its hash.
pub fn verify(root: &Path, manifest: &Manifest) -> Vec<String> {
    manifest
        .files
        .iter()
        .filter(|e| {
            fs::read(root.join(&e.path))
                .map(|b| sha256_hex(&b) != e.sha256)
                .unwrap_or(true)
        })
        .map(|e| e.path.clone())
        .collect()
}
