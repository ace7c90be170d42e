//! Output directories are assembled in a hidden sibling and renamed into
//! place at the end, so a failed run leaves nothing behind.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

pub struct Staging {
    target: PathBuf,
    dir: PathBuf,
    committed: bool,
}

impl Staging {
    /// `out` must be absent, empty, or (with `force`) a previous run's output.
    pub fn new(out: &Path, force: bool) -> CliResult<Self> {
        if out.exists() {
            if !out.is_dir() {
                return Err(CliError::usage(format!("{} exists and is not a directory", out.display())));
            }
            let empty = fs::read_dir(out)?.next().is_none();
            if !empty && !(force && out.join(MANIFEST_FILE).is_file()) {
                return Err(CliError::usage(format!(
                    "{} is not empty; pass --force to replace the output of an earlier run",
                    out.display()
                )));
            }
        }
        let name = out
            .file_name()
            .ok_or_else(|| CliError::usage(format!("invalid output directory {}", out.display())))?
            .to_string_lossy()
            .into_owned();
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)?;
        let dir = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir(&dir)?;
        Ok(Staging {
            target: out.to_path_buf(),
            dir,
            committed: false,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn create(&self, name: &str) -> CliResult<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    /// Writes through `f` and flushes.
    pub fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> knownet::Result<()>) -> CliResult<()> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    /// Records digests of everything written, adds the manifest and moves the
    /// directory into place.
    pub fn commit(mut self, mut manifest: Manifest) -> CliResult<()> {
        let mut names: Vec<String> = fs::read_dir(&self.dir)?
            .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect::<std::io::Result<_>>()?;
        names.sort();
        for name in names {
            manifest.outputs.push(FileDigest::of(&self.dir.join(&name), name)?);
        }
        self.write_json(MANIFEST_FILE, &manifest)?;
        if self.target.exists() {
            fs::remove_dir_all(&self.target)?;
        }
        fs::rename(&self.dir, &self.target)?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(file: &Path, path: String) -> CliResult<Self> {
        let mut f = File::open(file).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
        let mut hasher = Sha256::new();
        let mut buf = vec![0u8; 1 << 16];
        let mut bytes = 0u64;
        loop {
            let k = f.read(&mut buf)?;
            if k == 0 {
                break;
            }
            hasher.update(&buf[..k]);
            bytes += k as u64;
        }
        Ok(FileDigest {
            path,
            bytes,
            sha256: format!("{:x}", hasher.finalize()),
        })
    }
}

/// Run record written as `manifest.json` in every output directory.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    /// SHA-256 of the compact JSON encoding of `config`.
    pub config_hash: String,
    pub inputs: Vec<FileDigest>,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<FileDigest>,
    /// Command-specific results, such as the parameters a simulation used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
    pub timestamp_source: &'static str,
}

impl Manifest {
    pub fn new(command: &'static str, config: &impl Serialize) -> CliResult<Self> {
        let config = serde_json::to_value(config)?;
        let config_hash = format!("{:x}", Sha256::digest(serde_json::to_vec(&config)?));
        let (timestamp, timestamp_source) = match std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
            Some(t) => (t, "SOURCE_DATE_EPOCH"),
            None => (
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs()),
                "clock",
            ),
        };
        Ok(Manifest {
            tool: "knownet",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: std::env::args().skip(1).collect(),
            config,
            config_hash,
            inputs: Vec::new(),
            seeds: BTreeMap::new(),
            outputs: Vec::new(),
            results: None,
            timestamp,
            timestamp_source,
        })
    }

    pub fn input(&mut self, file: &Path) -> CliResult<()> {
        self.inputs.push(FileDigest::of(file, file.display().to_string())?);
        Ok(())
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.to_string(), seed);
    }
}

/// Reads the `command` field of a directory's manifest, if there is one.
pub fn producer(dir: &Path) -> Option<String> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("command")?.as_str().map(str::to_owned)
}
