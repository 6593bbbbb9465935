use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: Option<String>,
    pub bytes: Option<u64>,
}

/// Record of one command invocation, written next to its primary output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub threads: Option<usize>,
    pub inputs: Vec<Artifact>,
    pub outputs: Vec<Artifact>,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub status: String,
    #[serde(skip)]
    location: PathBuf,
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    sibling(primary, "manifest.json")
}

/// `dir/name.ext` → `dir/name.ext.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let mut file =
        BufReader::new(File::open(path).with_context(|| format!("reading {}", path.display()))?);
    let mut hasher = Sha256::new();
    let bytes = std::io::copy(&mut file, &mut hasher)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok((hex::encode(hasher.finalize()), bytes))
}

impl RunManifest {
    /// Creates the manifest and writes it before any long-running work.
    pub fn begin(
        command: &str,
        primary: &Path,
        config: serde_json::Value,
        seed: u64,
        threads: Option<usize>,
        inputs: &[&Path],
    ) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                let (sha, bytes) = sha256_file(p)?;
                Ok(Artifact {
                    path: p.to_path_buf(),
                    sha256: Some(sha),
                    bytes: Some(bytes),
                })
            })
            .collect::<Result<_>>()?;
        let m = Self {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config,
            seed,
            threads,
            inputs,
            outputs: Vec::new(),
            started_at: chrono::Utc::now().to_rfc3339(),
            finished_at: None,
            status: "running".into(),
            location: manifest_path(primary),
        };
        m.write()?;
        Ok(m)
    }

    /// Checksums every output and marks the run complete.
    pub fn finish(mut self, outputs: &[PathBuf]) -> Result<PathBuf> {
        self.outputs = outputs
            .iter()
            .map(|p| {
                let (sha, bytes) = sha256_file(p)?;
                Ok(Artifact {
                    path: p.clone(),
                    sha256: Some(sha),
                    bytes: Some(bytes),
                })
            })
            .collect::<Result<_>>()?;
        self.finished_at = Some(chrono::Utc::now().to_rfc3339());
        self.status = "ok".into();
        self.write()?;
        Ok(self.location)
    }

    fn write(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&self.location, text + "\n")
            .with_context(|| format!("writing {}", self.location.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_appends_suffix() {
        assert_eq!(
            sibling(Path::new("out/a.json"), "manifest.json"),
            PathBuf::from("out/a.json.manifest.json")
        );
    }

    #[test]
    fn checksum_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        std::fs::write(&p, b"abc").unwrap();
        let (sha, n) = sha256_file(&p).unwrap();
        assert_eq!(n, 3);
        assert_eq!(
            sha,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
