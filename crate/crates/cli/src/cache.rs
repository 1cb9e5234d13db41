//! Results cache under `$FRACTAL_DIMS_CACHE/results/<config hash>/`.

use crate::commands::OutFile;
use crate::io::{atomic_write, create_dir, read};
use crate::manifest::{sha256_hex, Manifest};
use crate::{CliError, Result};
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "FRACTAL_DIMS_CACHE";

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Cache::new)
    }

    pub fn dir(&self, key: &str) -> PathBuf {
        self.root.join("results").join(key)
    }

    /// A complete entry whose files still match their recorded hashes.
    pub fn load(&self, key: &str) -> Result<Option<(Manifest, Vec<OutFile>)>> {
        let dir = self.dir(key);
        let mpath = dir.join("manifest.json");
        if !mpath.exists() {
            return Ok(None);
        }
        let manifest: Manifest = serde_json::from_slice(&read(&mpath)?)?;
        if manifest.config_hash != key {
            return Ok(None);
        }
        let mut files = Vec::with_capacity(manifest.files.len());
        for f in &manifest.files {
            let Ok(bytes) = std::fs::read(dir.join(&f.name)) else {
                return Ok(None);
            };
            if sha256_hex(&bytes) != f.sha256 {
                return Ok(None);
            }
            files.push(OutFile { name: f.name.clone(), bytes });
        }
        Ok(Some((manifest, files)))
    }

    /// Populate a private directory, then rename it into place. A concurrent
    /// writer that got there first wins.
    pub fn store(&self, manifest: &Manifest, files: &[OutFile]) -> Result<()> {
        let results = self.root.join("results");
        create_dir(&results)?;
        let tmp = results.join(format!(".tmp-{}-{}", manifest.config_hash, std::process::id()));
        if tmp.exists() {
            remove(&tmp)?;
        }
        create_dir(&tmp)?;
        for f in files {
            atomic_write(&tmp.join(&f.name), &f.bytes)?;
        }
        atomic_write(&tmp.join("manifest.json"), &serde_json::to_vec_pretty(manifest)?)?;
        let dest = self.dir(&manifest.config_hash);
        if dest.exists() {
            remove(&dest)?;
        }
        if std::fs::rename(&tmp, &dest).is_err() {
            remove(&tmp)?;
        }
        Ok(())
    }
}

fn remove(p: &Path) -> Result<()> {
    std::fs::remove_dir_all(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })
}
